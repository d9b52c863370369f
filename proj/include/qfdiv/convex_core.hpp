#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfdiv/common.hpp"

namespace qfdiv {

using ScalarFn = std::function<double(double)>;

// Everything needed to describe a convex generator f and its conjugate.
// Empty conj / conj_prime means "evaluate the conjugate numerically".
struct GeneratorDefinition {
    std::string name;
    std::vector<std::pair<std::string, double>> params;

    ScalarFn f;
    ScalarFn f_prime_right;
    ScalarFn f_prime_left;
    Interval f_domain{0.0, kInf, true, false};

    ScalarFn conj;
    ScalarFn conj_prime;
    Interval conj_domain;

    std::optional<double> recession;       // lim_{s->0+} s f(1/s)
    std::optional<double> f_second_at_one;

    bool cond_I = false;   // f* operator convex
    bool cond_II = false;  // conjugate of the perspective-dual operator convex
    bool canonical = true;
};

// Immutable handle on a generator. Copies share the definition.
class DivergenceGenerator {
public:
    explicit DivergenceGenerator(GeneratorDefinition def);

    const std::string& name() const { return def_->name; }
    const std::vector<std::pair<std::string, double>>& params() const { return def_->params; }
    std::optional<double> param(const std::string& key) const;

    double f(double lambda) const;
    double f_prime_right(double lambda) const;
    double f_prime_left(double lambda) const;
    const Interval& f_domain() const { return def_->f_domain; }

    double conj(double t) const;
    double conj_prime(double t) const;
    const Interval& conj_domain() const { return def_->conj_domain; }
    bool has_closed_form_conjugate() const { return static_cast<bool>(def_->conj); }

    double f_at_zero() const { return f(0.0); }
    double f_at_one() const { return f(1.0); }
    double f_prime_at_one() const;
    double f_second_at_one() const { return f_second_at_one_; }
    double recession() const { return recession_; }

    bool cond_I() const { return def_->cond_I; }
    bool cond_II() const { return def_->cond_II; }
    bool canonical() const { return def_->canonical; }

    const GeneratorDefinition& definition() const { return *def_; }

private:
    std::shared_ptr<const GeneratorDefinition> def_;
    double recession_ = kInf;
    double f_second_at_one_ = 0.0;
};

// Value and maximizer of t*lambda - f(lambda), by bracketing plus golden section.
struct ConjugatePoint {
    double value;
    double argmax;
};
ConjugatePoint numeric_conjugate(const DivergenceGenerator& f, double t);

class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::vector<double> weights);

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& weights() const { return w_; }
    double total() const;

private:
    std::vector<double> w_;
};

double g_eval(const DivergenceGenerator& f, double lambda1, double lambda2);
double classical_df(const DivergenceGenerator& f, const DiscreteMeasure& p, const DiscreteMeasure& q);
double conjugate_eval(const DivergenceGenerator& f, double t);

DivergenceGenerator canonicalize(const DivergenceGenerator& f);
DivergenceGenerator hat(const DivergenceGenerator& f);

// Kernel reduction needs: canonical, cond_I, dom f* unbounded below, f(0) finite.
bool kernel_hypotheses_hold(const DivergenceGenerator& f);

namespace families {
DivergenceGenerator renyi(double alpha);
DivergenceGenerator chi2();
DivergenceGenerator fidelity();
DivergenceGenerator kl();
DivergenceGenerator reverse_kl();
DivergenceGenerator total_variation();
DivergenceGenerator fb();
bool is_renyi(const DivergenceGenerator& f, double alpha);
} // namespace families

} // namespace qfdiv
