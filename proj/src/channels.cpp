#include "polargp/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace polargp {

double StateChannel::p_y1(int y1, int x, int s) const {
    double acc = 0.0;
    for (int y2 = 0; y2 < ny2(); ++y2) acc += p(x, s, y1, y2);
    return acc;
}

double StateChannel::p_y2(int y2, int x, int s) const {
    double acc = 0.0;
    for (int y1 = 0; y1 < ny1(); ++y1) acc += p(x, s, y1, y2);
    return acc;
}

std::vector<double> StateChannel::marginal(int receiver) const {
    int ny = receiver == 1 ? ny1() : ny2();
    std::vector<double> w(size_t(nx()) * ns() * ny, 0.0);
    for (int x = 0; x < nx(); ++x)
        for (int s = 0; s < ns(); ++s)
            for (int y = 0; y < ny; ++y)
                w[(size_t(x) * ns() + s) * ny + y] =
                    receiver == 1 ? p_y1(y, x, s) : p_y2(y, x, s);
    return w;
}

void StateChannel::validate(double tol) const {
    state.validate(tol);
    if (static_cast<int>(state.probs.size()) != ns())
        throw std::invalid_argument("StateChannel: state pmf size mismatch");
    if (trans.size() != size_t(nx()) * ns() * ny1() * ny2())
        throw std::invalid_argument("StateChannel: transition table size mismatch");
    for (int x = 0; x < nx(); ++x)
        for (int s = 0; s < ns(); ++s) {
            double row = 0.0;
            for (int y1 = 0; y1 < ny1(); ++y1)
                for (int y2 = 0; y2 < ny2(); ++y2) {
                    double v = p(x, s, y1, y2);
                    if (v < 0.0) throw std::invalid_argument("StateChannel: negative entry");
                    row += v;
                }
            if (std::abs(row - 1.0) > tol)
                throw std::invalid_argument("StateChannel: row does not sum to 1");
        }
}

StateChannel make_bsc_interference(double p1, double p2, double q) {
    if (p1 < 0.0 || p1 > 0.5 || p2 < 0.0 || p2 > 0.5)
        throw std::invalid_argument("bsc-interference: p_i must be in [0, 1/2]");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("bsc-interference: q must be in [0,1]");
    StateChannel ch;
    ch.x_alphabet = {0, 1};
    ch.s_alphabet = {0, 1};
    ch.y1_alphabet = {0, 1};
    ch.y2_alphabet = {0, 1};
    ch.state = Pmf::bernoulli(q);
    ch.trans.assign(16, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int s = 0; s < 2; ++s)
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2) {
                    double pz1 = (y1 ^ x ^ s) ? p1 : 1.0 - p1;
                    double pz2 = (y2 ^ x ^ s) ? p2 : 1.0 - p2;
                    ch.trans[((size_t(x) * 2 + s) * 2 + y1) * 2 + y2] = pz1 * pz2;
                }
    return ch;
}

StateChannel make_stuck_memory(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("stuck-memory: p must be in [0,1]");
    StateChannel ch;
    ch.x_alphabet = {1, 2, 3, 4};
    ch.s_alphabet = {0, 1, 2, 3, 4};
    ch.y1_alphabet = {1, 2, 3, 4};
    ch.y2_alphabet = {0, 1};
    std::vector<double> ps = {1.0 - p, p / 4, p / 4, p / 4, p / 4};
    ch.state = Pmf(ch.s_alphabet, ps);
    ch.trans.assign(size_t(4) * 5 * 4 * 2, 0.0);
    for (int xi = 0; xi < 4; ++xi)
        for (int si = 0; si < 5; ++si) {
            int y1_val = (si == 0) ? ch.x_alphabet[xi] : ch.s_alphabet[si];
            int y1i = y1_val - 1;
            int y2i = (y1_val <= 2) ? 0 : 1;
            ch.trans[((size_t(xi) * 5 + si) * 4 + y1i) * 2 + y2i] = 1.0;
        }
    return ch;
}

Transmission sample_transmission(const StateChannel& ch, const std::vector<int>& x_block,
                                 const std::vector<int>& s_block, uint64_t seed) {
    if (x_block.size() != s_block.size())
        throw std::invalid_argument("sample_transmission: block length mismatch");
    Rng64 rng(seed);
    int n = static_cast<int>(x_block.size());
    Transmission out;
    out.y1.resize(n);
    out.y2.resize(n);
    for (int i = 0; i < n; ++i) {
        int x = x_block[i], s = s_block[i];
        if (x < 0 || x >= ch.nx() || s < 0 || s >= ch.ns())
            throw std::invalid_argument("sample_transmission: symbol outside alphabet");
        double u = rng.next_u01();
        double acc = 0.0;
        int pick = ch.ny1() * ch.ny2() - 1;
        for (int yy = 0; yy < ch.ny1() * ch.ny2(); ++yy) {
            acc += ch.p(x, s, yy / ch.ny2(), yy % ch.ny2());
            if (u < acc) {
                pick = yy;
                break;
            }
        }
        out.y1[i] = pick / ch.ny2();
        out.y2[i] = pick % ch.ny2();
    }
    return out;
}

std::vector<int> sample_state_block(const StateChannel& ch, int n, uint64_t seed) {
    Rng64 rng(seed);
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) {
        double u = rng.next_u01();
        double acc = 0.0;
        int pick = ch.ns() - 1;
        for (int k = 0; k < ch.ns(); ++k) {
            acc += ch.state[k];
            if (u < acc) {
                pick = k;
                break;
            }
        }
        s[i] = pick;
    }
    return s;
}

namespace {

// Dense phase-I simplex with Bland's rule: minimize the sum of artificial
// variables for A q = b, q >= 0. Small problems only (alphabets <= 5).
bool solve_feasibility(std::vector<std::vector<double>>& a, std::vector<double>& b,
                       int nvars, std::vector<double>& solution, double tol) {
    int m = static_cast<int>(a.size());
    for (int r = 0; r < m; ++r)
        if (b[r] < 0.0) {
            for (double& v : a[r]) v = -v;
            b[r] = -b[r];
        }
    int total = nvars + m;  // artificials appended
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(total + 1, 0.0));
    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < nvars; ++c) t[r][c] = a[r][c];
        t[r][nvars + r] = 1.0;
        t[r][total] = b[r];
        basis[r] = nvars + r;
    }
    // objective row: minimize sum of artificials, expressed in reduced form
    for (int c = 0; c <= total; ++c) {
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += t[r][c];
        t[m][c] = (c >= nvars && c < total) ? s - 1.0 : s;
    }
    for (int iter = 0; iter < 20000; ++iter) {
        int enter = -1;
        for (int c = 0; c < total; ++c)
            if (t[m][c] > 1e-11) {  // reduced cost favors decreasing objective
                enter = c;
                break;  // Bland
            }
        if (enter < 0) break;
        int leave = -1;
        double best = 0.0;
        for (int r = 0; r < m; ++r)
            if (t[r][enter] > 1e-11) {
                double ratio = t[r][total] / t[r][enter];
                if (leave < 0 || ratio < best - 1e-13 ||
                    (std::abs(ratio - best) <= 1e-13 && basis[r] < basis[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
        if (leave < 0) break;  // unbounded cannot happen here
        double piv = t[leave][enter];
        for (int c = 0; c <= total; ++c) t[leave][c] /= piv;
        for (int r = 0; r <= m; ++r)
            if (r != leave && std::abs(t[r][enter]) > 0.0) {
                double f = t[r][enter];
                for (int c = 0; c <= total; ++c) t[r][c] -= f * t[leave][c];
            }
        basis[leave] = enter;
    }
    if (t[m][total] > tol) return false;
    solution.assign(nvars, 0.0);
    for (int r = 0; r < m; ++r)
        if (basis[r] < nvars) solution[basis[r]] = t[r][total];
    return true;
}

}  // namespace

std::optional<DegradednessWitness> check_degraded(const StateChannel& ch, double tol) {
    int ny1 = ch.ny1(), ny2 = ch.ny2();
    int nvars = ny1 * ny2;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    // composition constraints: sum_{y1} P(y1|x,s) q(y2|y1) = P(y2|x,s)
    for (int x = 0; x < ch.nx(); ++x)
        for (int s = 0; s < ch.ns(); ++s)
            for (int y2 = 0; y2 < ny2; ++y2) {
                std::vector<double> row(nvars, 0.0);
                for (int y1 = 0; y1 < ny1; ++y1) row[y1 * ny2 + y2] = ch.p_y1(y1, x, s);
                a.push_back(std::move(row));
                b.push_back(ch.p_y2(y2, x, s));
            }
    // stochasticity: rows of q sum to 1
    for (int y1 = 0; y1 < ny1; ++y1) {
        std::vector<double> row(nvars, 0.0);
        for (int y2 = 0; y2 < ny2; ++y2) row[y1 * ny2 + y2] = 1.0;
        a.push_back(std::move(row));
        b.push_back(1.0);
    }
    std::vector<double> q;
    if (!solve_feasibility(a, b, nvars, q, tol)) return std::nullopt;
    DegradednessWitness w;
    w.q = q;
    double worst = 0.0;
    for (int x = 0; x < ch.nx(); ++x)
        for (int s = 0; s < ch.ns(); ++s)
            for (int y2 = 0; y2 < ny2; ++y2) {
                double acc = 0.0;
                for (int y1 = 0; y1 < ny1; ++y1) acc += ch.p_y1(y1, x, s) * q[y1 * ny2 + y2];
                worst = std::max(worst, std::abs(acc - ch.p_y2(y2, x, s)));
            }
    w.residual = worst;
    if (worst > tol) return std::nullopt;
    return w;
}

}  // namespace polargp
