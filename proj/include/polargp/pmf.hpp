#pragma once

#include <vector>

namespace polargp {

// Distribution over a small finite alphabet. `support` holds the symbol
// values (defaults to 0..m-1); probabilities are indexed positionally.
struct Pmf {
    std::vector<int> support;
    std::vector<double> probs;

    Pmf() = default;
    explicit Pmf(std::vector<double> p);
    Pmf(std::vector<int> sup, std::vector<double> p);

    int size() const { return static_cast<int>(probs.size()); }
    double operator[](int i) const { return probs[i]; }

    void validate(double tol = 1e-12) const;  // throws std::invalid_argument

    static Pmf bernoulli(double p1);
    static Pmf uniform(int m);
    static Pmf point_mass(int m, int at);
};

// Joint law of a binary symbol X and a finite observation. Everything the
// polarization machinery consumes is one of these; composite observations
// (pairs, triples) are fused into a single product alphabet by the caller.
struct JointPmf {
    int obs_size = 0;
    std::vector<int> obs_alphabet;   // symbol values, size obs_size
    std::vector<double> table;       // table[x * obs_size + o], x in {0,1}

    JointPmf() = default;
    JointPmf(int m, std::vector<double> t);

    double p(int x, int o) const { return table[static_cast<size_t>(x) * obs_size + o]; }
    Pmf x_marginal() const;
    Pmf obs_marginal() const;

    void validate(double tol = 1e-12) const;

    // X ~ px observed through the row-stochastic channel w[x*m + o].
    static JointPmf from_channel(const Pmf& px, const std::vector<double>& w, int m);
    // X ~ Bern(px1) through a binary symmetric channel.
    static JointPmf bsc(double px1, double crossover);
    // Degenerate single-symbol observation; conditioning on "nothing".
    static JointPmf with_constant_obs(const Pmf& px);
    // Noiseless identity observation of X.
    static JointPmf identity(const Pmf& px);
};

// Shannon entropy in bits. 0*log 0 taken as 0 throughout.
double entropy(const Pmf& p);

double conditional_entropy(const JointPmf& j);  // H(X|obs)
double joint_entropy(const JointPmf& j);        // H(X,obs)
double mutual_information(const JointPmf& j);   // I(X;obs)

// Z(X|obs) = 2 sum_o sqrt(P(0,o) P(1,o)). Zero-mass observations drop out.
double bhattacharyya(const JointPmf& j);

double binary_entropy(double p);  // H2(p) in bits

}  // namespace polargp
