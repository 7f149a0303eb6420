#include "polargp/pmf.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polargp {

namespace {
double nlog2n(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }
}  // namespace

Pmf::Pmf(std::vector<double> p) : probs(std::move(p)) {
    support.resize(probs.size());
    std::iota(support.begin(), support.end(), 0);
}

Pmf::Pmf(std::vector<int> sup, std::vector<double> p)
    : support(std::move(sup)), probs(std::move(p)) {
    if (support.size() != probs.size())
        throw std::invalid_argument("Pmf: support/probs size mismatch");
}

void Pmf::validate(double tol) const {
    if (probs.empty()) throw std::invalid_argument("Pmf: empty");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("Pmf: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
        throw std::invalid_argument("Pmf: probabilities do not sum to 1");
}

Pmf Pmf::bernoulli(double p1) { return Pmf({1.0 - p1, p1}); }

Pmf Pmf::uniform(int m) { return Pmf(std::vector<double>(m, 1.0 / m)); }

Pmf Pmf::point_mass(int m, int at) {
    std::vector<double> p(m, 0.0);
    p[at] = 1.0;
    return Pmf(std::move(p));
}

JointPmf::JointPmf(int m, std::vector<double> t) : obs_size(m), table(std::move(t)) {
    if (table.size() != static_cast<size_t>(2 * m))
        throw std::invalid_argument("JointPmf: table must have 2*obs_size entries");
    obs_alphabet.resize(m);
    std::iota(obs_alphabet.begin(), obs_alphabet.end(), 0);
}

Pmf JointPmf::x_marginal() const {
    double p0 = 0.0, p1 = 0.0;
    for (int o = 0; o < obs_size; ++o) {
        p0 += p(0, o);
        p1 += p(1, o);
    }
    return Pmf({p0, p1});
}

Pmf JointPmf::obs_marginal() const {
    std::vector<double> m(obs_size, 0.0);
    for (int o = 0; o < obs_size; ++o) m[o] = p(0, o) + p(1, o);
    return Pmf(obs_alphabet, std::move(m));
}

void JointPmf::validate(double tol) const {
    if (obs_size <= 0) throw std::invalid_argument("JointPmf: empty observation alphabet");
    double sum = 0.0;
    for (double v : table) {
        if (v < 0.0) throw std::invalid_argument("JointPmf: negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
        throw std::invalid_argument("JointPmf: entries do not sum to 1");
}

JointPmf JointPmf::from_channel(const Pmf& px, const std::vector<double>& w, int m) {
    if (px.size() != 2) throw std::invalid_argument("from_channel: X must be binary");
    if (w.size() != static_cast<size_t>(2 * m))
        throw std::invalid_argument("from_channel: bad channel table");
    std::vector<double> t(2 * m);
    for (int x = 0; x < 2; ++x)
        for (int o = 0; o < m; ++o) t[x * m + o] = px[x] * w[x * m + o];
    return JointPmf(m, std::move(t));
}

JointPmf JointPmf::bsc(double px1, double crossover) {
    std::vector<double> w = {1.0 - crossover, crossover, crossover, 1.0 - crossover};
    return from_channel(Pmf::bernoulli(px1), w, 2);
}

JointPmf JointPmf::with_constant_obs(const Pmf& px) {
    if (px.size() != 2) throw std::invalid_argument("with_constant_obs: X must be binary");
    return JointPmf(1, {px[0], px[1]});
}

JointPmf JointPmf::identity(const Pmf& px) {
    if (px.size() != 2) throw std::invalid_argument("identity: X must be binary");
    return JointPmf(2, {px[0], 0.0, 0.0, px[1]});
}

double entropy(const Pmf& p) {
    double h = 0.0;
    for (double v : p.probs) h -= nlog2n(v);
    return h;
}

double joint_entropy(const JointPmf& j) {
    double h = 0.0;
    for (double v : j.table) h -= nlog2n(v);
    return h;
}

double conditional_entropy(const JointPmf& j) {
    // H(X|obs) = H(X,obs) - H(obs)
    return joint_entropy(j) - entropy(j.obs_marginal());
}

double mutual_information(const JointPmf& j) {
    return entropy(j.x_marginal()) - conditional_entropy(j);
}

double bhattacharyya(const JointPmf& j) {
    double z = 0.0;
    for (int o = 0; o < j.obs_size; ++o) z += std::sqrt(j.p(0, o) * j.p(1, o));
    return 2.0 * z;
}

double binary_entropy(double p) { return -nlog2n(p) - nlog2n(1.0 - p); }

}  // namespace polargp
