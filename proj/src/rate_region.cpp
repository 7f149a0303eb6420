#include "polargp/rate_region.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "polargp/construction.hpp"
#include "polargp/rng.hpp"

namespace polargp {

namespace {

double ent(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

// Full joint P(v1, v2, s, y1, y2) induced by a strategy.
struct StateJoint {
    int nv1, nv2, ns, ny1, ny2;
    std::vector<double> j;
    double& at(int v1, int v2, int s, int y1, int y2) {
        return j[(((size_t(v1) * nv2 + v2) * ns + s) * ny1 + y1) * ny2 + y2];
    }
    double at(int v1, int v2, int s, int y1, int y2) const {
        return j[(((size_t(v1) * nv2 + v2) * ns + s) * ny1 + y1) * ny2 + y2];
    }
};

StateJoint make_joint(const StateChannel& ch, const AuxStrategy& st) {
    StateJoint out{st.v1_size, st.v2_size, ch.ns(), ch.ny1(), ch.ny2(), {}};
    out.j.assign(size_t(out.nv1) * out.nv2 * out.ns * out.ny1 * out.ny2, 0.0);
    for (int v1 = 0; v1 < out.nv1; ++v1)
        for (int v2 = 0; v2 < out.nv2; ++v2)
            for (int s = 0; s < out.ns; ++s) {
                double base = ch.state[s] * st.pv1_given_s[size_t(s) * st.v1_size + v1] *
                              st.pv2_given_v1s[(size_t(v1) * out.ns + s) * st.v2_size + v2];
                if (base == 0.0) continue;
                int x = st.f[(size_t(v1) * st.v2_size + v2) * out.ns + s];
                for (int y1 = 0; y1 < out.ny1; ++y1)
                    for (int y2 = 0; y2 < out.ny2; ++y2)
                        out.at(v1, v2, s, y1, y2) += base * ch.p(x, s, y1, y2);
            }
    return out;
}

// marginal entropy over a subset of the five coordinates
double joint_entropy_over(const StateJoint& sj, bool mv1, bool mv2, bool ms, bool my1, bool my2) {
    size_t dim = 1;
    if (mv1) dim *= sj.nv1;
    if (mv2) dim *= sj.nv2;
    if (ms) dim *= sj.ns;
    if (my1) dim *= sj.ny1;
    if (my2) dim *= sj.ny2;
    std::vector<double> m(dim, 0.0);
    for (int v1 = 0; v1 < sj.nv1; ++v1)
        for (int v2 = 0; v2 < sj.nv2; ++v2)
            for (int s = 0; s < sj.ns; ++s)
                for (int y1 = 0; y1 < sj.ny1; ++y1)
                    for (int y2 = 0; y2 < sj.ny2; ++y2) {
                        size_t idx = 0;
                        if (mv1) idx = idx * sj.nv1 + v1;
                        if (mv2) idx = idx * sj.nv2 + v2;
                        if (ms) idx = idx * sj.ns + s;
                        if (my1) idx = idx * sj.ny1 + y1;
                        if (my2) idx = idx * sj.ny2 + y2;
                        m[idx] += sj.at(v1, v2, s, y1, y2);
                    }
    return ent(m);
}

}  // namespace

RegionCorner region_bcsi_common(const StateChannel& ch, const Pmf& input) {
    if (ch.ns() != 1) throw std::invalid_argument("region_bcsi_common: constant-state channel required");
    if (input.size() != ch.nx()) throw std::invalid_argument("region_bcsi_common: input pmf size");
    int nx = ch.nx(), ny1 = ch.ny1(), ny2 = ch.ny2();
    std::vector<double> j1(size_t(nx) * ny1, 0.0), j2(size_t(nx) * ny2, 0.0);
    std::vector<double> px(nx), py1(ny1, 0.0), py2(ny2, 0.0);
    for (int x = 0; x < nx; ++x) {
        px[x] = input[x];
        for (int y = 0; y < ny1; ++y) {
            j1[size_t(x) * ny1 + y] = input[x] * ch.p_y1(y, x, 0);
            py1[y] += j1[size_t(x) * ny1 + y];
        }
        for (int y = 0; y < ny2; ++y) {
            j2[size_t(x) * ny2 + y] = input[x] * ch.p_y2(y, x, 0);
            py2[y] += j2[size_t(x) * ny2 + y];
        }
    }
    RegionCorner c;
    c.r1 = ent(px) + ent(py1) - ent(j1);
    c.r2 = ent(px) + ent(py2) - ent(j2);
    return c;
}

double region_gp(const StateChannel& ch, int receiver, const GpStrategy& st) {
    st.validate(ch);
    int nu = st.v_size, ns = ch.ns();
    int ny = receiver == 1 ? ch.ny1() : ch.ny2();
    auto marg = ch.marginal(receiver);
    std::vector<double> jus(size_t(nu) * ns, 0.0), juy(size_t(nu) * ny, 0.0);
    std::vector<double> pu(nu, 0.0), ps(ns), py(ny, 0.0);
    for (int s = 0; s < ns; ++s) {
        ps[s] = ch.state[s];
        for (int u = 0; u < nu; ++u) {
            double base = ch.state[s] * st.pv_given_s[size_t(s) * nu + u];
            jus[size_t(u) * ns + s] = base;
            pu[u] += base;
            if (base == 0.0) continue;
            int x = st.f[size_t(u) * ns + s];
            for (int y = 0; y < ny; ++y) juy[size_t(u) * ny + y] += base * marg[(size_t(x) * ns + s) * ny + y];
        }
    }
    for (int u = 0; u < nu; ++u)
        for (int y = 0; y < ny; ++y) py[y] += juy[size_t(u) * ny + y];
    double i_uy = ent(pu) + ent(py) - ent(juy);
    double i_us = ent(pu) + ent(ps) - ent(jus);
    return i_uy - i_us;
}

StateRegion region_bcsi_state(const StateChannel& ch, const AuxStrategy& st) {
    st.validate(ch);
    StateJoint sj = make_joint(ch, st);
    double h_v12 = joint_entropy_over(sj, true, true, false, false, false);
    double h_s = joint_entropy_over(sj, false, false, true, false, false);
    double h_y1 = joint_entropy_over(sj, false, false, false, true, false);
    double h_y2 = joint_entropy_over(sj, false, false, false, false, true);
    double h_v1 = joint_entropy_over(sj, true, false, false, false, false);
    double h_v12_y1 = joint_entropy_over(sj, true, true, false, true, false);
    double h_v12_s = joint_entropy_over(sj, true, true, true, false, false);
    double h_v1_y1 = joint_entropy_over(sj, true, false, false, true, false);
    double h_v1_y2 = joint_entropy_over(sj, true, false, false, false, true);
    double h_v1_s = joint_entropy_over(sj, true, false, true, false, false);

    StateRegion out;
    out.corner.r1 = (h_v12 + h_y1 - h_v12_y1) - (h_v12 + h_s - h_v12_s);
    out.corner.r2 = (h_v1 + h_y2 - h_v1_y2) - (h_v1 + h_s - h_v1_s);
    // I(V2;Y1|V1) = H(V2,V1) + H(Y1,V1) - H(V1) - H(V1,V2,Y1)
    double i_v2y1_v1 = h_v12 + h_v1_y1 - h_v1 - h_v12_y1;
    double i_v2s_v1 = h_v12 + h_v1_s - h_v1 - h_v12_s;
    out.c3_gap = i_v2y1_v1 - i_v2s_v1;
    out.c4_gap = (h_v1 + h_y1 - h_v1_y1) - (h_v1 + h_s - h_v1_s);
    out.c5_gap = (h_v1 + h_y2 - h_v1_y2) - (h_v1 + h_s - h_v1_s);
    const double tol = 1e-9;
    out.c3 = out.c3_gap > tol;
    out.c4 = out.c4_gap > tol;
    out.c5 = out.c5_gap > tol;
    out.boundary = std::abs(out.c3_gap) <= tol || std::abs(out.c4_gap) <= tol ||
                   std::abs(out.c5_gap) <= tol;
    return out;
}

namespace {

// all pmfs with entries m/grid over `size` symbols, lexicographic
void simplex_grid(int size, int grid, std::vector<std::vector<double>>& out) {
    std::vector<int> counts(size, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == size - 1) {
            counts[pos] = left;
            std::vector<double> p(size);
            for (int i = 0; i < size; ++i) p[i] = double(counts[i]) / grid;
            out.push_back(std::move(p));
            return;
        }
        for (int c = left; c >= 0; --c) {
            counts[pos] = c;
            rec(pos + 1, left - c);
        }
    };
    rec(0, grid);
}

// distinct per-state symbol columns V -> X, deduplicated by the channel
// slice they induce (two columns mapping to identical P(y1,y2|v,s) rows
// are interchangeable)
std::vector<std::vector<int>> column_classes(const StateChannel& ch, int s, int nv) {
    int nx = ch.nx(), ny = ch.ny1() * ch.ny2();
    std::vector<std::vector<int>> classes;
    std::vector<uint64_t> seen;
    long total = 1;
    for (int v = 0; v < nv; ++v) total *= nx;
    std::vector<int> col(nv);
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int v = 0; v < nv; ++v) {
            col[v] = int(c % nx);
            c /= nx;
        }
        uint64_t h = 0x2545f4914f6cdd1dULL;
        for (int v = 0; v < nv; ++v)
            for (int yy = 0; yy < ny; ++yy) {
                double val = ch.p(col[v], s, yy / ch.ny2(), yy % ch.ny2());
                h = mix64(h ^ uint64_t(std::llround(val * 1e12)));
            }
        if (std::find(seen.begin(), seen.end(), h) == seen.end()) {
            seen.push_back(h);
            classes.push_back(col);
        }
    }
    return classes;
}

struct Candidate {
    double objective = -1e300;
    long order = -1;  // enumeration index for deterministic tie-breaks
    RegionCorner corner;
    AuxStrategy strategy;
    bool found = false;

    void consider(double obj, long ord, const RegionCorner& c, const AuxStrategy& st) {
        if (!found || obj > objective + 1e-15 ||
            (std::abs(obj - objective) <= 1e-15 && ord < order)) {
            objective = obj;
            order = ord;
            corner = c;
            strategy = st;
            found = true;
        }
    }
    void merge(const Candidate& other) {
        if (!other.found) return;
        if (!found || other.objective > objective + 1e-15 ||
            (std::abs(other.objective - objective) <= 1e-15 && other.order < order))
            *this = other;
    }
};

}  // namespace

SearchResult search_strategies(const StateChannel& ch, int v1_size, int v2_size, int grid,
                               double weight_r1, double r2_floor, long budget, int threads) {
    if (v1_size < 1 || v2_size < 1 || grid < 1)
        throw std::invalid_argument("search_strategies: bad bounds");
    const int ns = ch.ns();
    const int nv = v1_size * v2_size;

    // enumeration space checks before any work
    double raw_cols = std::pow(double(ch.nx()), double(nv));
    if (raw_cols > double(budget))
        throw InfeasibleError("search_strategies: symbol-map enumeration exceeds budget");

    std::vector<std::vector<std::vector<int>>> cols(ns);
    double class_product = 1.0;
    for (int s = 0; s < ns; ++s) {
        cols[s] = column_classes(ch, s, nv);
        class_product *= double(cols[s].size());
    }
    std::vector<std::vector<double>> grid1, grid2;
    simplex_grid(v1_size, grid, grid1);
    if (v2_size > 1) simplex_grid(v2_size, grid, grid2);

    double row_combos = std::pow(double(grid1.size()), double(ns));
    if (v2_size > 1) row_combos *= std::pow(double(grid2.size()), double(v1_size) * ns);
    if (class_product * row_combos > double(budget))
        throw InfeasibleError("search_strategies: grid enumeration exceeds budget");
    const long n_classes = std::lround(class_product);
    const long rows_per_class = std::lround(row_combos);

    // per-row entropies of the V1 grid, shared across candidates
    std::vector<double> row_ent(grid1.size());
    for (size_t g = 0; g < grid1.size(); ++g) row_ent[g] = ent(grid1[g]);

    auto nth_class = [&](long idx, std::vector<const std::vector<int>*>& pick) {
        pick.resize(ns);
        for (int s = 0; s < ns; ++s) {
            pick[s] = &cols[s][idx % cols[s].size()];
            idx /= long(cols[s].size());
        }
    };

    const bool fast = v2_size == 1;
    const int ny1 = ch.ny1(), ny2 = ch.ny2();

    auto run_class = [&](long ci, Candidate& best, long& evals) {
        std::vector<const std::vector<int>*> pick;
        nth_class(ci, pick);
        std::vector<long> row_idx(ns, 0);
        std::vector<long> v2_idx;
        if (v2_size > 1) v2_idx.assign(size_t(v1_size) * ns, 0);
        for (long r = 0; r < rows_per_class; ++r) {
            // decode the mixed-radix row index
            long idx = r;
            for (int s = 0; s < ns; ++s) {
                row_idx[s] = idx % long(grid1.size());
                idx /= long(grid1.size());
            }
            if (v2_size > 1)
                for (auto& vi : v2_idx) {
                    vi = idx % long(grid2.size());
                    idx /= long(grid2.size());
                }
            ++evals;
            long order = ci * rows_per_class + r;
            if (fast) {
                // corner coordinates assembled directly: both receivers see
                // V = V1 through per-state columns
                double h_v_s = 0.0;
                std::vector<double> jy1(size_t(nv) * ny1, 0.0), jy2(size_t(nv) * ny2, 0.0);
                for (int s = 0; s < ns; ++s) {
                    double ps = ch.state[s];
                    h_v_s += ps * row_ent[row_idx[s]];
                    const auto& q = grid1[row_idx[s]];
                    const auto& col = *pick[s];
                    for (int v = 0; v < nv; ++v) {
                        double base = ps * q[v];
                        if (base == 0.0) continue;
                        for (int y1 = 0; y1 < ny1; ++y1)
                            for (int y2 = 0; y2 < ny2; ++y2) {
                                double val = base * ch.p(col[v], s, y1, y2);
                                jy1[size_t(v) * ny1 + y1] += val;
                                jy2[size_t(v) * ny2 + y2] += val;
                            }
                    }
                }
                std::vector<double> py1(ny1, 0.0), py2(ny2, 0.0);
                for (int v = 0; v < nv; ++v) {
                    for (int y1 = 0; y1 < ny1; ++y1) py1[y1] += jy1[size_t(v) * ny1 + y1];
                    for (int y2 = 0; y2 < ny2; ++y2) py2[y2] += jy2[size_t(v) * ny2 + y2];
                }
                RegionCorner c;
                c.r1 = h_v_s - (ent(jy1) - ent(py1));
                c.r2 = h_v_s - (ent(jy2) - ent(py2));
                if (c.r2 + 1e-9 < r2_floor) continue;
                double obj = weight_r1 * c.r1 + (1.0 - weight_r1) * c.r2;
                if (best.found && obj <= best.objective + 1e-15 && best.order <= order) continue;
                AuxStrategy st;
                st.v1_size = v1_size;
                st.v2_size = 1;
                st.pv1_given_s.resize(size_t(ns) * v1_size);
                for (int s = 0; s < ns; ++s)
                    for (int v = 0; v < v1_size; ++v)
                        st.pv1_given_s[size_t(s) * v1_size + v] = grid1[row_idx[s]][v];
                st.pv2_given_v1s.assign(size_t(v1_size) * ns, 1.0);
                st.f.resize(size_t(nv) * ns);
                for (int v = 0; v < nv; ++v)
                    for (int s = 0; s < ns; ++s) st.f[size_t(v) * ns + s] = (*pick[s])[v];
                best.consider(obj, order, c, st);
            } else {
                AuxStrategy st;
                st.v1_size = v1_size;
                st.v2_size = v2_size;
                st.pv1_given_s.resize(size_t(ns) * v1_size);
                for (int s = 0; s < ns; ++s)
                    for (int v = 0; v < v1_size; ++v)
                        st.pv1_given_s[size_t(s) * v1_size + v] = grid1[row_idx[s]][v];
                st.pv2_given_v1s.resize(size_t(v1_size) * ns * v2_size);
                for (int v1 = 0; v1 < v1_size; ++v1)
                    for (int s = 0; s < ns; ++s)
                        for (int v2 = 0; v2 < v2_size; ++v2)
                            st.pv2_given_v1s[(size_t(v1) * ns + s) * v2_size + v2] =
                                grid2[v2_idx[size_t(v1) * ns + s]][v2];
                st.f.resize(size_t(nv) * ns);
                for (int v = 0; v < nv; ++v)
                    for (int s = 0; s < ns; ++s) st.f[size_t(v) * ns + s] = (*pick[s])[v];
                auto reg = region_bcsi_state(ch, st);
                if (reg.corner.r2 + 1e-9 < r2_floor) continue;
                double obj = weight_r1 * reg.corner.r1 + (1.0 - weight_r1) * reg.corner.r2;
                best.consider(obj, order, reg.corner, st);
            }
        }
    };

    int nthreads = int(std::max<long>(1, std::min<long>(threads, n_classes)));
    std::vector<Candidate> bests(nthreads);
    std::vector<long> evals(nthreads, 0);
    if (nthreads == 1) {
        for (long ci = 0; ci < n_classes; ++ci) run_class(ci, bests[0], evals[0]);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nthreads; ++w)
            pool.emplace_back([&, w] {
                for (long ci = w; ci < n_classes; ci += nthreads) run_class(ci, bests[w], evals[w]);
            });
        for (auto& th : pool) th.join();
    }
    SearchResult out;
    Candidate final;
    for (int w = 0; w < nthreads; ++w) {
        final.merge(bests[w]);
        out.evaluations += evals[w];
    }
    out.found = final.found;
    if (final.found) {
        out.best = final.corner;
        out.strategy = final.strategy;
    }
    return out;
}

}  // namespace polargp
