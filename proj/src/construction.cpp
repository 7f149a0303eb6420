#include "polargp/construction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "polargp/rng.hpp"
#include "polargp/sc_engine.hpp"

namespace polargp {

namespace {

void sample_joint_block(const JointPmf& joint, int n, Rng64& rng, BitBlock& x,
                        std::vector<int>& obs) {
    x.resize(n);
    obs.resize(n);
    for (int i = 0; i < n; ++i) {
        double u = rng.next_u01();
        double acc = 0.0;
        x[i] = 1;
        obs[i] = joint.obs_size - 1;
        bool hit = false;
        for (int xi = 0; xi < 2 && !hit; ++xi)
            for (int o = 0; o < joint.obs_size && !hit; ++o) {
                acc += joint.p(xi, o);
                if (u < acc) {
                    x[i] = static_cast<uint8_t>(xi);
                    obs[i] = o;
                    hit = true;
                }
            }
    }
}

}  // namespace

ZProfile estimate_z_profile(const JointPmf& joint, int n, int samples, uint64_t seed,
                            const std::string& label, int threads) {
    if (!is_power_of_two(n)) throw std::invalid_argument("estimate_z_profile: n must be a power of 2");
    if (samples < 1) throw std::invalid_argument("estimate_z_profile: samples must be >= 1");
    joint.validate(1e-9);

    // Fixed-size chunks keep the reduction order (and therefore the exact
    // floating point result) independent of the thread count.
    const int chunk = 64;
    const int nchunks = (samples + chunk - 1) / chunk;
    std::vector<std::vector<double>> sums(nchunks), sqs(nchunks);

    auto run_chunk = [&](int c) {
        std::vector<double>&s = sums[c], &q = sqs[c];
        s.assign(n, 0.0);
        q.assign(n, 0.0);
        int lo = c * chunk, hi = std::min(samples, lo + chunk);
        BitBlock x;
        std::vector<int> obs;
        for (int smp = lo; smp < hi; ++smp) {
            Rng64 rng(mix64(seed + 0x632be59bd9b4e019ULL * (uint64_t(smp) + 1)));
            sample_joint_block(joint, n, rng, x, obs);
            BitBlock u = polar_transform(x);
            ScEvaluator ev(joint, obs);
            for (int i = 0; i < n; ++i) {
                auto c0 = ev.next_conditional();
                double z = c0 ? c0->z() : 1.0;
                s[i] += z;
                q[i] += z * z;
                ev.push(u[i]);
            }
        }
    };

    int nthreads = std::max(1, std::min(threads, nchunks));
    if (nthreads == 1) {
        for (int c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < nthreads; ++w)
            pool.emplace_back([&] {
                for (int c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1)) run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    ZProfile prof;
    prof.n = n;
    prof.conditioning = label;
    prof.h_cond = conditional_entropy(joint);
    prof.samples = samples;
    prof.z.assign(n, 0.0);
    prof.var.assign(n, 0.0);
    for (int c = 0; c < nchunks; ++c)
        for (int i = 0; i < n; ++i) prof.z[i] += sums[c][i];
    for (int i = 0; i < n; ++i) prof.z[i] /= samples;
    if (samples > 1) {
        for (int c = 0; c < nchunks; ++c)
            for (int i = 0; i < n; ++i) prof.var[i] += sqs[c][i];
        for (int i = 0; i < n; ++i)
            prof.var[i] =
                std::max(0.0, (prof.var[i] - samples * prof.z[i] * prof.z[i]) / (samples - 1));
    }
    return prof;
}

void PolarSets::validate_partition() const {
    for (const auto& part : rx) {
        std::vector<int> seen(n, 0);
        for (const auto* s : {&part.info, &part.f_approx, &part.f_relay, &part.f_free})
            for (int i : *s) {
                if (i < 0 || i >= n) throw std::logic_error("PolarSets: index out of range");
                ++seen[i];
            }
        for (int i = 0; i < n; ++i)
            if (seen[i] != 1) throw std::logic_error("PolarSets: partition violated");
    }
}

namespace {

// indices ordered by z, ties broken toward the lower index
std::vector<int> order_by_z(const std::vector<double>& z, bool descending) {
    std::vector<int> idx(z.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (z[a] != z[b]) return descending ? z[a] > z[b] : z[a] < z[b];
        return a < b;
    });
    return idx;
}

std::vector<bool> mask_of(const std::vector<int>& idx, int n) {
    std::vector<bool> m(n, false);
    for (int i : idx) m[i] = true;
    return m;
}

std::vector<int> sorted_prefix(const std::vector<int>& ranked, int count) {
    std::vector<int> out(ranked.begin(), ranked.begin() + count);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

PolarSets build_polar_sets(const ZProfile& state_profile,
                           const std::vector<ZProfile>& out_profiles, const SetPolicy& policy) {
    const int n = state_profile.n;
    if (out_profiles.empty()) throw std::invalid_argument("build_polar_sets: no output profiles");
    for (const auto& p : out_profiles)
        if (p.n != n) throw std::invalid_argument("build_polar_sets: profile length mismatch");

    PolarSets sets;
    sets.n = n;

    auto cut = [&](const ZProfile& prof, bool high, std::vector<int>& out_set) {
        if (policy.mode == SetPolicy::Mode::Threshold) {
            double delta = std::pow(2.0, -std::pow(double(n), policy.beta));
            for (int i = 0; i < n; ++i)
                if (high ? prof.z[i] >= 1.0 - delta : prof.z[i] <= delta) out_set.push_back(i);
        } else {
            double frac = high ? prof.h_cond : 1.0 - prof.h_cond;
            long count = std::lround(std::ceil(frac * n - 1e-9));
            count = std::max(0L, std::min<long>(n, count));
            out_set = sorted_prefix(order_by_z(prof.z, high), int(count));
        }
    };

    cut(state_profile, true, sets.h_state);
    cut(state_profile, false, sets.l_state);

    auto h_mask = mask_of(sets.h_state, n);
    for (const auto& prof : out_profiles) {
        std::vector<int> h, l;
        cut(prof, true, h);
        cut(prof, false, l);
        auto l_mask = mask_of(l, n);
        SetPartition part;
        for (int i = 0; i < n; ++i) {
            if (h_mask[i] && l_mask[i]) part.info.push_back(i);
            else if (h_mask[i]) part.f_approx.push_back(i);
            else if (l_mask[i]) part.f_free.push_back(i);
            else part.f_relay.push_back(i);
        }
        auto info_mask = mask_of(part.info, n);
        for (int i : order_by_z(prof.z, false))
            if (info_mask[i]) part.info_ranked.push_back(i);
        part.z_out = prof.z;
        sets.h_out.push_back(std::move(h));
        sets.l_out.push_back(std::move(l));
        sets.rx.push_back(std::move(part));
    }
    sets.validate_partition();
    return sets;
}

namespace {

// Blahut-Arimoto over a fixed conditional W[v][y]; returns (capacity nats, q).
std::pair<double, std::vector<double>> blahut_arimoto(const std::vector<double>& w, int nv,
                                                      int ny, double tol_nats) {
    std::vector<double> q(nv, 1.0 / nv), r(ny), t(nv);
    double low = 0.0;
    for (int iter = 0; iter < 200000; ++iter) {
        for (int y = 0; y < ny; ++y) {
            double acc = 0.0;
            for (int v = 0; v < nv; ++v) acc += q[v] * w[size_t(v) * ny + y];
            r[y] = acc;
        }
        double up = -1e300;
        for (int v = 0; v < nv; ++v) {
            double acc = 0.0;
            for (int y = 0; y < ny; ++y) {
                double wy = w[size_t(v) * ny + y];
                if (wy > 0.0) acc += wy * std::log(wy / r[y]);
            }
            t[v] = acc;
            up = std::max(up, acc);
        }
        double s = 0.0;
        for (int v = 0; v < nv; ++v) s += q[v] * std::exp(t[v]);
        low = std::log(s);
        if (up - low < tol_nats) break;
        for (int v = 0; v < nv; ++v) q[v] *= std::exp(t[v]) / s;
    }
    return {std::max(0.0, low), q};
}

}  // namespace

CausalStrategy causal_capacity(const StateChannel& ch, int receiver, int v_bound,
                               bool ignore_state, long f_budget) {
    const int nx = ch.nx(), ns = ch.ns();
    const int ny = receiver == 1 ? ch.ny1() : ch.ny2();
    const int nv = v_bound > 0 ? v_bound : nx * ns;
    const auto marg = ch.marginal(receiver);

    const int cells = ignore_state ? nv : nv * ns;
    double count = std::pow(double(nx), double(cells));
    if (count > double(f_budget))
        throw InfeasibleError("causal_capacity: strategy enumeration exceeds budget");
    long total = std::lround(count);

    std::unordered_set<uint64_t> seen;
    CausalStrategy best;
    best.v_size = nv;
    best.capacity = -1.0;

    std::vector<int> f(size_t(nv) * ns);
    std::vector<double> w(size_t(nv) * ny);
    for (long code = 0; code < total; ++code) {
        long c = code;
        if (ignore_state) {
            for (int v = 0; v < nv; ++v) {
                int g = int(c % nx);
                c /= nx;
                for (int s = 0; s < ns; ++s) f[size_t(v) * ns + s] = g;
            }
        } else {
            for (size_t cell = 0; cell < f.size(); ++cell) {
                f[cell] = int(c % nx);
                c /= nx;
            }
        }
        // induced channel V -> Y
        std::fill(w.begin(), w.end(), 0.0);
        for (int v = 0; v < nv; ++v)
            for (int s = 0; s < ns; ++s) {
                double ps = ch.state[s];
                if (ps == 0.0) continue;
                int x = f[size_t(v) * ns + s];
                for (int y = 0; y < ny; ++y)
                    w[size_t(v) * ny + y] += ps * marg[(size_t(x) * ns + s) * ny + y];
            }
        // skip maps with an already-seen induced conditional
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (double val : w) h = mix64(h ^ uint64_t(std::llround(val * 1e12)));
        if (!seen.insert(h).second) continue;

        auto [cap_nats, q] = blahut_arimoto(w, nv, ny, 1e-11);
        double cap = cap_nats / std::log(2.0);
        if (cap > best.capacity + 1e-12) {
            best.capacity = cap;
            best.f = f;
            best.pv = Pmf(q);
        }
    }
    return best;
}

// ---- chain planning ----------------------------------------------------

void BlockRoles::init(int n) {
    kind.assign(n, uint8_t(SlotKind::Gamma));
    chain_src.assign(n, -1);
    chain_delta.assign(n, 0);
    stream_pos.assign(n, -1);
}

namespace {

std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<int> set_and(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

long ceil_div(long a, long b) { return (a + b - 1) / b; }

long bits_of(double rate, long symbols) {
    if (rate < 0.0) throw std::invalid_argument("negative rate");
    return std::lround(std::ceil(rate * double(symbols) - 1e-9));
}

// highest `count` members of an ascending set, returned ascending
std::vector<int> highest(const std::vector<int>& sorted_asc, int count) {
    return std::vector<int>(sorted_asc.end() - count, sorted_asc.end());
}

// relay set of a partition, widened by the free-frozen indices whose
// output-side reliability is below the guard
std::vector<int> guarded_relay(const SetPartition& part, double guard) {
    std::vector<int> out = part.f_relay;
    if (!part.z_out.empty() && guard < 1.0)
        for (int i : part.f_free)
            if (part.z_out[i] > guard) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

void place_stream(BlockRoles& roles, const std::vector<int>& slots, SlotKind kind, long& counter) {
    for (int i : slots) {
        roles.kind[i] = uint8_t(kind);
        roles.stream_pos[i] = int32_t(counter++);
    }
}

void place_chain(BlockRoles& roles, const std::vector<int>& slots, const std::vector<int>& src,
                 int src_offset, int delta) {
    for (size_t a = 0; a < slots.size(); ++a) {
        roles.kind[slots[a]] = uint8_t(SlotKind::Chain);
        roles.chain_src[slots[a]] = src[src_offset + a];
        roles.chain_delta[slots[a]] = int8_t(delta);
    }
}

ChainPlan plan_gp(const PlanRequest& req) {
    const auto& part = req.sets->rx.at(0);
    const int n = req.n, k = req.k;
    if (k < 1) throw std::invalid_argument("plan_chain: k must be >= 1");

    ChainPlan plan;
    plan.scheme = req.scheme;
    plan.n = n;
    plan.k = k;
    plan.f1r = guarded_relay(part, req.relay_guard);
    const long f1r = long(plan.f1r.size());

    if (f1r > 0) {
        if (req.pre1_info_ranked.empty())
            throw InfeasibleError("gp plan: relay-frozen bits present but causal pre-phase empty");
        plan.t = int(ceil_div(f1r, long(req.pre1_info_ranked.size())));
    }
    plan.m1_bits = bits_of(req.r1, long(k + plan.t) * n);
    long slots_per_block = ceil_div(plan.m1_bits, k);
    long s1 = f1r + slots_per_block;
    if (s1 > long(part.info.size()))
        throw InfeasibleError("gp plan: requested rate exceeds the information set");
    plan.i1 = sorted_prefix(part.info_ranked, int(s1));
    plan.r1 = highest(plan.i1, int(f1r));
    std::vector<int> m1slots = set_minus(plan.i1, plan.r1);
    plan.private_capacity = long(k) * long(m1slots.size());

    std::vector<bool> in_hc(n, false);
    for (int i : part.f_relay) in_hc[i] = true;
    for (int i : part.f_free) in_hc[i] = true;

    long priv = 0;
    for (int b = 0; b < k; ++b) {
        BlockRoles roles;
        roles.init(n);
        for (int i = 0; i < n; ++i)
            if (in_hc[i]) roles.kind[i] = uint8_t(SlotKind::Lambda);
        place_stream(roles, m1slots, SlotKind::Private, priv);
        if (b > 0) place_chain(roles, plan.r1, plan.f1r, 0, -1);
        // block 0 chain slots stay gamma
        plan.layer1.push_back(std::move(roles));
    }
    if (plan.t > 0) {
        plan.pre1_per_block = int(ceil_div(f1r, plan.t));
        plan.pre1_slots = sorted_prefix(req.pre1_info_ranked, plan.pre1_per_block);
    }
    return plan;
}

ChainPlan plan_bcsi_common(const PlanRequest& req) {
    const int n = req.n, k = req.k;
    if (k < 2) throw std::invalid_argument("bcsi-common plan: k must be >= 2");
    if (req.r1 < req.r2)
        throw InfeasibleError("bcsi-common plan: orientation requires R1 >= R2; swap receivers");
    const auto& p1 = req.sets->rx.at(0);
    const auto& p2 = req.sets->rx.at(1);

    ChainPlan plan;
    plan.scheme = SchemeKind::BcsiCommon;
    plan.n = n;
    plan.k = k;
    plan.m0_bits = bits_of(req.r0, long(k) * n);
    plan.m1_bits = bits_of(req.r1, long(k) * n);
    plan.m2_bits = bits_of(req.r2, long(k) * n);
    plan.m10_bits = plan.m2_bits;
    plan.m11_bits = plan.m1_bits - plan.m2_bits;
    plan.m0p_bits = plan.m0_bits + plan.m2_bits;

    long s2 = std::max(1L, ceil_div(plan.m0p_bits, k));
    long s1 = s2 + ceil_div(plan.m11_bits, k - 1);
    for (;;) {
        if (s1 > long(p1.info.size()) || s2 > long(p2.info.size()))
            throw InfeasibleError("bcsi-common plan: requested rates exceed the information sets");
        plan.i1 = sorted_prefix(p1.info_ranked, int(s1));
        plan.i2 = sorted_prefix(p2.info_ranked, int(s2));
        long c = long(set_and(plan.i1, plan.i2).size());
        bool common_ok = (k - 1) * s2 + c >= plan.m0p_bits;
        bool private_ok = (k - 1) * (s1 - s2) >= plan.m11_bits;
        if (common_ok && private_ok) break;
        if (!common_ok) {
            ++s2;
            ++s1;  // keep the private capacity
        } else {
            ++s1;
        }
    }
    std::vector<int> core = set_and(plan.i1, plan.i2);
    plan.d1 = set_minus(plan.i1, plan.i2);
    plan.d2 = set_minus(plan.i2, plan.i1);
    if (plan.d1.size() < plan.d2.size())
        throw InfeasibleError("bcsi-common plan: |D1| < |D2| under R1 >= R2; swap receivers");
    plan.d10.assign(plan.d1.begin(), plan.d1.begin() + plan.d2.size());
    std::vector<int> d1free = set_minus(plan.d1, plan.d10);
    plan.common_capacity = (k - 1) * s2 + long(core.size());
    plan.private_capacity = (k - 1) * long(d1free.size());

    long common = 0, priv = 0;
    for (int b = 0; b < k; ++b) {
        BlockRoles roles;
        roles.init(n);
        for (int i = 0; i < n; ++i) roles.kind[i] = uint8_t(SlotKind::Lambda);
        if (b == 0) {
            place_stream(roles, plan.i2, SlotKind::Common, common);
        } else if (b < k - 1) {
            place_stream(roles, plan.i2, SlotKind::Common, common);
            place_chain(roles, plan.d10, plan.d2, 0, -1);
            place_stream(roles, d1free, SlotKind::Private, priv);
        } else {
            place_stream(roles, core, SlotKind::Common, common);
            place_chain(roles, plan.d10, plan.d2, 0, -1);
            place_stream(roles, d1free, SlotKind::Private, priv);
        }
        plan.layer1.push_back(std::move(roles));
    }
    return plan;
}

ChainPlan plan_bcsi_state(const PlanRequest& req) {
    const int n = req.n, k = req.k;
    if (k < 2) throw std::invalid_argument("bcsi-state plan: k must be >= 2");
    if (req.r1 < req.r2)
        throw InfeasibleError("bcsi-state plan: orientation requires R1 >= R2; swap receivers");
    if (!req.layer2) throw std::invalid_argument("bcsi-state plan: layer-2 partition required");
    const auto& p1 = req.sets->rx.at(0);
    const auto& p2 = req.sets->rx.at(1);
    const auto& p11 = *req.layer2;

    ChainPlan plan;
    plan.scheme = SchemeKind::BcsiState;
    plan.n = n;
    plan.k = k;
    plan.f1r = guarded_relay(p1, req.relay_guard);
    plan.f2r = guarded_relay(p2, req.relay_guard);
    plan.f11r = guarded_relay(p11, req.relay_guard);
    const long f1r = long(plan.f1r.size()), f2r = long(plan.f2r.size()),
               f11r = long(plan.f11r.size());

    long need1 = f1r + f11r, need2 = f2r;
    long t = 0;
    if (need1 > 0) {
        if (req.pre1_info_ranked.empty())
            throw InfeasibleError("bcsi-state plan: receiver-1 pre-phase needed but empty");
        t = std::max(t, ceil_div(need1, long(req.pre1_info_ranked.size())));
    }
    if (need2 > 0) {
        if (req.pre2_info_ranked.empty())
            throw InfeasibleError("bcsi-state plan: receiver-2 pre-phase needed but empty");
        t = std::max(t, ceil_div(need2, long(req.pre2_info_ranked.size())));
    }
    plan.t = int(t);

    const long symbols = long(k + 2 * t) * n;
    plan.m0_bits = bits_of(req.r0, symbols);
    plan.m1_bits = bits_of(req.r1, symbols);
    plan.m2_bits = bits_of(req.r2, symbols);
    plan.m11_bits = req.layer2_rate >= 0.0 ? bits_of(req.layer2_rate, symbols) : 0;
    plan.m10_bits = plan.m1_bits - plan.m11_bits;
    if (plan.m10_bits < plan.m2_bits) {
        if (req.layer2_rate >= 0.0)
            throw InfeasibleError("bcsi-state plan: R11 too large for the R10 >= R2 split");
        plan.m10_bits = plan.m2_bits;
        plan.m11_bits = plan.m1_bits - plan.m10_bits;
    }
    plan.m101_bits = plan.m10_bits - plan.m2_bits;
    plan.m0p_bits = plan.m0_bits + plan.m2_bits;

    // layer-1 sizing: info sets are shrunk to the most reliable indices
    // that still fit the chains and the requested streams. The bump rule
    // mirrors the common-message plan so that with empty relay sets both
    // plans land on identical set sizes.
    long s2 = f2r + std::max(1L, ceil_div(plan.m0p_bits, k));
    long s1 = std::max(s2 + std::max(0L, f1r - f2r) + ceil_div(plan.m101_bits, k - 1), f1r + 1);
    for (;;) {
        if (s1 > long(p1.info.size()) || s2 > long(p2.info.size()))
            throw InfeasibleError("bcsi-state plan: requested rates exceed the information sets");
        plan.i1 = sorted_prefix(p1.info_ranked, int(s1));
        plan.i2 = sorted_prefix(p2.info_ranked, int(s2));
        long c = long(set_and(plan.i1, plan.i2).size());
        long excl2 = s2 - c;
        long w = std::max(0L, f2r - excl2);
        if ((s1 - c) < f1r) {
            ++s1;
            continue;
        }
        long d1 = (s1 - f1r) - (c - w);
        long d2 = w > 0 ? 0 : excl2 - f2r;
        if (d1 < d2) {
            ++s1;
            continue;
        }
        long common_cap = (k - 1) * (s2 - f2r) + (c - w);
        long priv_cap = (k - 1) * (d1 - d2);
        bool common_ok = common_cap >= plan.m0p_bits;
        bool private_ok = priv_cap >= plan.m101_bits;
        if (common_ok && private_ok) {
            plan.overlap = int(w);
            plan.case_mark = w > 0 ? 'b' : 'a';
            plan.common_capacity = common_cap;
            plan.private_capacity = priv_cap;
            break;
        }
        if (!common_ok) {
            ++s2;
            ++s1;  // keep the private capacity, as in the common plan
        } else {
            ++s1;
        }
    }

    std::vector<int> core_full = set_and(plan.i1, plan.i2);
    std::vector<int> excl1 = set_minus(plan.i1, plan.i2);
    std::vector<int> excl2 = set_minus(plan.i2, plan.i1);
    const long w = plan.overlap;
    plan.r1 = highest(excl1, int(f1r));
    if (plan.case_mark == 'b') {
        plan.xor_slots = highest(core_full, int(w));
        plan.r2 = excl2;  // direct chain slots; the W' head rides the XOR
    } else {
        plan.r2 = highest(excl2, int(f2r));
    }
    std::vector<int> core = set_minus(core_full, plan.xor_slots);
    std::vector<int> m2set = set_minus(set_minus(plan.i2, plan.r2), plan.xor_slots);
    std::vector<int> m1set = set_minus(plan.i1, plan.r1);
    plan.d1 = set_minus(m1set, m2set);  // includes the xor slots in case (b)
    plan.d2 = set_minus(m2set, m1set);
    std::vector<int> d1_direct;
    if (plan.case_mark == 'a') {
        plan.d10.assign(plan.d1.begin(), plan.d1.begin() + plan.d2.size());
        d1_direct = set_minus(plan.d1, plan.d10);
    } else {
        d1_direct = set_minus(plan.d1, plan.xor_slots);
    }

    std::vector<bool> in_hc(n, false);
    for (int i : p1.f_relay) in_hc[i] = true;
    for (int i : p1.f_free) in_hc[i] = true;

    long common = 0, priv = 0;
    for (int b = 0; b < k; ++b) {
        BlockRoles roles;
        roles.init(n);
        for (int i = 0; i < n; ++i)
            if (in_hc[i]) roles.kind[i] = uint8_t(SlotKind::Lambda);
        const bool first = b == 0, last = b == k - 1;
        // M0' fills M2 (core plus D2, ascending) except in the last block,
        // where only the common core remains
        if (!last) place_stream(roles, m2set, SlotKind::Common, common);
        else place_stream(roles, core, SlotKind::Common, common);
        if (!first) place_chain(roles, plan.r1, plan.f1r, 0, -1);
        if (!last) place_chain(roles, plan.r2, plan.f2r, int(w), +1);
        if (!first && plan.case_mark == 'a') place_chain(roles, plan.d10, plan.d2, 0, -1);
        if (plan.case_mark == 'b' && !last) {
            long w1_base = first ? -1 : priv;  // block 0 draws W'1 from the R1 gammas
            if (!first) priv += w;
            for (long a = 0; a < w; ++a) {
                int i = plan.xor_slots[a];
                roles.kind[i] = uint8_t(SlotKind::Xor);
                roles.chain_src[i] = plan.f2r[a];  // W'2 source in the next block
                roles.chain_delta[i] = +1;
                roles.stream_pos[i] = w1_base < 0 ? -1 : int32_t(w1_base + a);
            }
        }
        if (!first) {
            place_stream(roles, d1_direct, SlotKind::Private, priv);
            if (last && plan.case_mark == 'b')
                place_stream(roles, plan.xor_slots, SlotKind::Private, priv);
        }
        plan.layer1.push_back(std::move(roles));
    }

    // layer 2: single forward chain through R11
    long s11 = std::max(f11r, ceil_div(plan.m11_bits + (k - 1) * f11r, k));
    if (s11 > long(p11.info.size()))
        throw InfeasibleError("bcsi-state plan: layer-2 rate exceeds its information set");
    plan.layer2_capacity = s11 + (k - 1) * (s11 - f11r);
    plan.i11 = sorted_prefix(p11.info_ranked, int(s11));
    plan.r11 = highest(plan.i11, int(f11r));
    std::vector<int> m11slots = set_minus(plan.i11, plan.r11);

    std::vector<bool> in_hc2(n, false);
    for (int i : p11.f_relay) in_hc2[i] = true;
    for (int i : p11.f_free) in_hc2[i] = true;
    long l2 = 0;
    for (int b = 0; b < k; ++b) {
        BlockRoles roles;
        roles.init(n);
        for (int i = 0; i < n; ++i)
            if (in_hc2[i]) roles.kind[i] = uint8_t(SlotKind::Lambda);
        if (b == 0) {
            place_stream(roles, plan.i11, SlotKind::Private, l2);
        } else {
            place_chain(roles, plan.r11, plan.f11r, 0, -1);
            place_stream(roles, m11slots, SlotKind::Private, l2);
        }
        plan.layer2.push_back(std::move(roles));
    }

    if (plan.t > 0) {
        if (need1 > 0) {
            plan.pre1_per_block = int(ceil_div(need1, t));
            plan.pre1_slots = sorted_prefix(req.pre1_info_ranked, plan.pre1_per_block);
        }
        if (need2 > 0) {
            plan.pre2_per_block = int(ceil_div(need2, t));
            plan.pre2_slots = sorted_prefix(req.pre2_info_ranked, plan.pre2_per_block);
        }
    }
    return plan;
}

}  // namespace

ChainPlan plan_chain(const PlanRequest& req) {
    if (!req.sets) throw std::invalid_argument("plan_chain: sets required");
    if (!is_power_of_two(req.n) || req.n != req.sets->n)
        throw std::invalid_argument("plan_chain: bad block length");
    switch (req.scheme) {
        case SchemeKind::P2p:
        case SchemeKind::GpSingle:
            return plan_gp(req);
        case SchemeKind::BcsiCommon:
            return plan_bcsi_common(req);
        case SchemeKind::BcsiState:
            return plan_bcsi_state(req);
    }
    throw std::logic_error("plan_chain: unknown scheme");
}

}  // namespace polargp
