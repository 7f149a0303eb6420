#include "polargp/strategy.hpp"

#include <cmath>
#include <stdexcept>

namespace polargp {

namespace {
void check_rows(const std::vector<double>& table, int rows, int cols, const char* what) {
    if (table.size() != size_t(rows) * cols) throw std::invalid_argument(std::string(what) + ": bad size");
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < cols; ++c) {
            double v = table[size_t(r) * cols + c];
            if (v < 0.0) throw std::invalid_argument(std::string(what) + ": negative entry");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument(std::string(what) + ": row does not sum to 1");
    }
}
}  // namespace

void GpStrategy::validate(const StateChannel& ch) const {
    check_rows(pv_given_s, ch.ns(), v_size, "GpStrategy.pv_given_s");
    if (f.size() != size_t(v_size) * ch.ns()) throw std::invalid_argument("GpStrategy.f: bad size");
    for (int x : f)
        if (x < 0 || x >= ch.nx()) throw std::invalid_argument("GpStrategy.f: symbol out of range");
}

GpStrategy GpStrategy::dirty_paper_xor() {
    GpStrategy s;
    s.v_size = 2;
    s.pv_given_s = {0.5, 0.5, 0.5, 0.5};
    s.f = {0, 1, 1, 0};  // f[v*2+s] = v ^ s
    return s;
}

void AuxStrategy::validate(const StateChannel& ch) const {
    check_rows(pv1_given_s, ch.ns(), v1_size, "AuxStrategy.pv1_given_s");
    check_rows(pv2_given_v1s, v1_size * ch.ns(), v2_size, "AuxStrategy.pv2_given_v1s");
    if (f.size() != size_t(v1_size) * v2_size * ch.ns())
        throw std::invalid_argument("AuxStrategy.f: bad size");
    for (int x : f)
        if (x < 0 || x >= ch.nx()) throw std::invalid_argument("AuxStrategy.f: symbol out of range");
}

GpStrategy AuxStrategy::layer1_as_gp(const StateChannel& ch) const {
    if (v2_size != 1) throw std::invalid_argument("layer1_as_gp: V2 must be constant");
    GpStrategy s;
    s.v_size = v1_size;
    s.pv_given_s = pv1_given_s;
    s.f.resize(size_t(v1_size) * ch.ns());
    for (int v1 = 0; v1 < v1_size; ++v1)
        for (int si = 0; si < ch.ns(); ++si)
            s.f[size_t(v1) * ch.ns() + si] = f[(size_t(v1) * v2_size + 0) * ch.ns() + si];
    return s;
}

AuxStrategy AuxStrategy::from_gp(const GpStrategy& s, const StateChannel& ch) {
    // V2 widened to a binary point mass so the two-layer codec accepts it;
    // region values are unchanged (the second layer carries nothing)
    AuxStrategy a;
    a.v1_size = s.v_size;
    a.v2_size = 2;
    a.pv1_given_s = s.pv_given_s;
    a.pv2_given_v1s.assign(size_t(s.v_size) * ch.ns() * 2, 0.0);
    for (int r = 0; r < s.v_size * ch.ns(); ++r) a.pv2_given_v1s[size_t(r) * 2] = 1.0;
    a.f.resize(size_t(s.v_size) * 2 * ch.ns());
    for (int v1 = 0; v1 < s.v_size; ++v1)
        for (int v2 = 0; v2 < 2; ++v2)
            for (int st = 0; st < ch.ns(); ++st)
                a.f[(size_t(v1) * 2 + v2) * ch.ns() + st] = s.f[size_t(v1) * ch.ns() + st];
    return a;
}

AuxStrategy stuck_memory_strategy() {
    // alphabets: V2 indexes the written symbol {1,2,3,4}; V1 = 0 for
    // {1,2} and 1 for {3,4}; states are {0 (writable), 1..4 (stuck)}
    const int ns = 5, nv1 = 2, nv2 = 4;
    AuxStrategy st;
    st.v1_size = nv1;
    st.v2_size = nv2;
    st.pv1_given_s.assign(size_t(ns) * nv1, 0.0);
    st.pv2_given_v1s.assign(size_t(nv1) * ns * nv2, 0.0);
    st.f.resize(size_t(nv1) * nv2 * ns);
    auto half = [](int v2) { return v2 < 2 ? 0 : 1; };
    for (int s = 0; s < ns; ++s) {
        if (s == 0) {
            st.pv1_given_s[0 * nv1 + 0] = 0.5;
            st.pv1_given_s[0 * nv1 + 1] = 0.5;
        } else {
            st.pv1_given_s[size_t(s) * nv1 + half(s - 1)] = 1.0;
        }
        for (int v1 = 0; v1 < nv1; ++v1) {
            double* row = &st.pv2_given_v1s[(size_t(v1) * ns + s) * nv2];
            if (s == 0) {
                // uniform over the two symbols in this half
                row[v1 * 2 + 0] = 0.5;
                row[v1 * 2 + 1] = 0.5;
            } else if (half(s - 1) == v1) {
                row[s - 1] = 1.0;
            } else {
                // zero-probability branch of the chain rule; any row works
                row[v1 * 2 + 0] = 0.5;
                row[v1 * 2 + 1] = 0.5;
            }
        }
    }
    for (int v1 = 0; v1 < nv1; ++v1)
        for (int v2 = 0; v2 < nv2; ++v2)
            for (int s = 0; s < ns; ++s) st.f[(size_t(v1) * nv2 + v2) * ns + s] = v2;
    return st;
}

JointPmf law_v1_state(const StateChannel& ch, const AuxStrategy& st) {
    if (st.v1_size != 2) throw std::invalid_argument("law_v1_state: binary V1 required");
    int ns = ch.ns();
    std::vector<double> t(size_t(2) * ns, 0.0);
    for (int v1 = 0; v1 < 2; ++v1)
        for (int s = 0; s < ns; ++s)
            t[size_t(v1) * ns + s] = ch.state[s] * st.pv1_given_s[size_t(s) * 2 + v1];
    return JointPmf(ns, std::move(t));
}

JointPmf law_v1_output(const StateChannel& ch, const AuxStrategy& st, int receiver) {
    if (st.v1_size != 2) throw std::invalid_argument("law_v1_output: binary V1 required");
    int ns = ch.ns(), ny = receiver == 1 ? ch.ny1() : ch.ny2();
    std::vector<double> t(size_t(2) * ny, 0.0);
    for (int v1 = 0; v1 < 2; ++v1)
        for (int v2 = 0; v2 < st.v2_size; ++v2)
            for (int s = 0; s < ns; ++s) {
                double base = ch.state[s] * st.pv1_given_s[size_t(s) * 2 + v1] *
                              st.pv2_given_v1s[(size_t(v1) * ns + s) * st.v2_size + v2];
                if (base == 0.0) continue;
                int x = st.f[(size_t(v1) * st.v2_size + v2) * ns + s];
                for (int y = 0; y < ny; ++y)
                    t[size_t(v1) * ny + y] +=
                        base * (receiver == 1 ? ch.p_y1(y, x, s) : ch.p_y2(y, x, s));
            }
    return JointPmf(ny, std::move(t));
}

JointPmf law_v2_state(const StateChannel& ch, const AuxStrategy& st) {
    if (st.v2_size != 2) throw std::invalid_argument("law_v2_state: binary V2 required");
    int ns = ch.ns();
    int m = 2 * ns;  // fused (v1, s)
    std::vector<double> t(size_t(2) * m, 0.0);
    for (int v1 = 0; v1 < 2; ++v1)
        for (int s = 0; s < ns; ++s)
            for (int v2 = 0; v2 < 2; ++v2)
                t[size_t(v2) * m + fuse_v1s(v1, s, ns)] =
                    ch.state[s] * st.pv1_given_s[size_t(s) * 2 + v1] *
                    st.pv2_given_v1s[(size_t(v1) * ns + s) * 2 + v2];
    return JointPmf(m, std::move(t));
}

JointPmf law_v2_output(const StateChannel& ch, const AuxStrategy& st) {
    if (st.v2_size != 2) throw std::invalid_argument("law_v2_output: binary V2 required");
    int ns = ch.ns(), ny = ch.ny1();
    int m = 2 * ny;  // fused (v1, y1)
    std::vector<double> t(size_t(2) * m, 0.0);
    for (int v1 = 0; v1 < 2; ++v1)
        for (int v2 = 0; v2 < 2; ++v2)
            for (int s = 0; s < ns; ++s) {
                double base = ch.state[s] * st.pv1_given_s[size_t(s) * 2 + v1] *
                              st.pv2_given_v1s[(size_t(v1) * ns + s) * 2 + v2];
                if (base == 0.0) continue;
                int x = st.f[(size_t(v1) * 2 + v2) * ns + s];
                for (int y = 0; y < ny; ++y)
                    t[size_t(v2) * m + fuse_v1y(v1, y, ny)] += base * ch.p_y1(y, x, s);
            }
    return JointPmf(m, std::move(t));
}

JointPmf law_gp_state(const StateChannel& ch, const GpStrategy& st) {
    if (st.v_size != 2) throw std::invalid_argument("law_gp_state: binary V required");
    int ns = ch.ns();
    std::vector<double> t(size_t(2) * ns, 0.0);
    for (int v = 0; v < 2; ++v)
        for (int s = 0; s < ns; ++s)
            t[size_t(v) * ns + s] = ch.state[s] * st.pv_given_s[size_t(s) * 2 + v];
    return JointPmf(ns, std::move(t));
}

JointPmf law_gp_output(const StateChannel& ch, const GpStrategy& st, int receiver) {
    if (st.v_size != 2) throw std::invalid_argument("law_gp_output: binary V required");
    int ns = ch.ns(), ny = receiver == 1 ? ch.ny1() : ch.ny2();
    std::vector<double> t(size_t(2) * ny, 0.0);
    for (int v = 0; v < 2; ++v)
        for (int s = 0; s < ns; ++s) {
            double base = ch.state[s] * st.pv_given_s[size_t(s) * 2 + v];
            if (base == 0.0) continue;
            int x = st.f[size_t(v) * ns + s];
            for (int y = 0; y < ny; ++y)
                t[size_t(v) * ny + y] +=
                    base * (receiver == 1 ? ch.p_y1(y, x, s) : ch.p_y2(y, x, s));
        }
    return JointPmf(ny, std::move(t));
}

JointPmf law_causal_prior(const GpStrategy& st, const Pmf& pv) {
    (void)st;
    return JointPmf::with_constant_obs(pv);
}

JointPmf law_causal_output(const StateChannel& ch, const GpStrategy& st, const Pmf& pv,
                           int receiver) {
    if (st.v_size != 2) throw std::invalid_argument("law_causal_output: binary V required");
    int ns = ch.ns(), ny = receiver == 1 ? ch.ny1() : ch.ny2();
    std::vector<double> t(size_t(2) * ny, 0.0);
    for (int v = 0; v < 2; ++v)
        for (int s = 0; s < ns; ++s) {
            double base = pv[v] * ch.state[s];
            if (base == 0.0) continue;
            int x = st.f[size_t(v) * ns + s];
            for (int y = 0; y < ny; ++y)
                t[size_t(v) * ny + y] +=
                    base * (receiver == 1 ? ch.p_y1(y, x, s) : ch.p_y2(y, x, s));
        }
    return JointPmf(ny, std::move(t));
}

}  // namespace polargp
