#include "qfdiv/convex_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfdiv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_num(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

DivergenceGenerator::DivergenceGenerator(GeneratorDefinition def)
{
    if (!def.f || !def.f_prime_right || !def.f_prime_left)
        throw InputError("generator '" + def.name + "': f and both one-sided derivatives are required");
    if (def.conj_domain.lower > def.conj_domain.upper)
        throw InputError("generator '" + def.name + "': empty conjugate domain");

    // proper on (0, inf): finite there, and finite at 1
    for (double x : {1e-3, 0.5, 1.0, 2.0, 1e3}) {
        double v = def.f(x);
        if (!std::isfinite(v))
            throw InputError("generator '" + def.name + "' is not finite at lambda=" + fmt_num(x));
    }

    const double s = 1e-8;
    recession_ = def.recession ? *def.recession : s * def.f(1.0 / s);
    if (def.f_second_at_one) {
        f_second_at_one_ = *def.f_second_at_one;
    } else {
        const double h = 1e-4;
        f_second_at_one_ = (def.f(1 + h) - 2 * def.f(1.0) + def.f(1 - h)) / (h * h);
    }
    def_ = std::make_shared<const GeneratorDefinition>(std::move(def));
}

std::optional<double> DivergenceGenerator::param(const std::string& key) const
{
    for (const auto& [k, v] : def_->params)
        if (k == key) return v;
    return std::nullopt;
}

double DivergenceGenerator::f(double lambda) const { return def_->f(lambda); }
double DivergenceGenerator::f_prime_right(double lambda) const { return def_->f_prime_right(lambda); }
double DivergenceGenerator::f_prime_left(double lambda) const { return def_->f_prime_left(lambda); }

double DivergenceGenerator::f_prime_at_one() const
{
    return 0.5 * (f_prime_right(1.0) + f_prime_left(1.0));
}

double DivergenceGenerator::conj(double t) const
{
    if (def_->conj) return def_->conj(t);
    if (!def_->conj_domain.contains(t)) return kInf;
    return numeric_conjugate(*this, t).value;
}

double DivergenceGenerator::conj_prime(double t) const
{
    if (def_->conj_prime) return def_->conj_prime(t);
    if (!def_->conj_domain.contains(t)) return kNaN;
    return numeric_conjugate(*this, t).argmax;
}

ConjugatePoint numeric_conjugate(const DivergenceGenerator& f, double t)
{
    const Interval& dom = f.f_domain();
    auto phi = [&](double x) {
        double v = f.f(x);
        return std::isfinite(v) ? t * x - v : -kInf;
    };

    const double big = 1e15;
    double a = dom.bounded_below() ? dom.lower : -1.0;
    double b = std::max(a, 0.0) + 1.0;
    if (dom.bounded_below() && !dom.lower_closed)
        a = dom.lower + 1e-300;

    // phi is concave: walk outwards until the one-sided slopes change sign
    while (t > f.f_prime_left(b) && b < big) {
        a = b;
        b += 1 + 2 * std::abs(b);
    }
    while (!dom.bounded_below() && t < f.f_prime_right(a) && a > -big) {
        b = a;
        a -= 1 + 2 * std::abs(a);
    }

    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    const double tol = 1e-12 * (1 + std::abs(t));
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = phi(c), fd = phi(d);
    for (int it = 0; it < 400 && (b - a) > tol * (1 + std::abs(a) + std::abs(b)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = phi(d);
        }
    }

    ConjugatePoint best{phi(a), a};
    for (double x : {b, c, d}) {
        double v = phi(x);
        if (v > best.value) best = {v, x};
    }
    return best;
}

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights) : w_(std::move(weights))
{
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (!std::isfinite(w_[i]) || w_[i] < 0)
            throw InputError("measure weight " + std::to_string(i) + " is negative or not finite");
}

double DiscreteMeasure::total() const
{
    double s = 0;
    for (double x : w_) s += x;
    return s;
}

double g_eval(const DivergenceGenerator& f, double lambda1, double lambda2)
{
    if (std::isnan(lambda1) || std::isnan(lambda2))
        throw InputError("g_eval: NaN argument");
    if (lambda2 < 0) return kInf;
    if (lambda2 == 0) {
        if (lambda1 == 0) return 0.0;
        if (lambda1 > 0) {
            double r = f.recession();
            return std::isinf(r) ? r : lambda1 * r;
        }
        const double s = 1e-8;
        return s * f.f(lambda1 / s);
    }
    double v = f.f(lambda1 / lambda2);
    if (std::isinf(v)) return v;
    return lambda2 * v;
}

double classical_df(const DivergenceGenerator& f, const DiscreteMeasure& p, const DiscreteMeasure& q)
{
    if (p.size() != q.size())
        throw InputError("classical_df: measures have different lengths (" + std::to_string(p.size()) +
                         " vs " + std::to_string(q.size()) + ")");
    double sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double g = g_eval(f, p[i], q[i]);
        if (g == kInf) return kInf;
        sum += g;
    }
    return sum;
}

double conjugate_eval(const DivergenceGenerator& f, double t) { return f.conj(t); }

DivergenceGenerator canonicalize(const DivergenceGenerator& f)
{
    if (f.canonical()) return f;

    const double t0 = f.f_prime_right(0.0);
    const double f0 = f.f(0.0);
    const bool affine = std::isfinite(t0) && std::isfinite(f0);

    GeneratorDefinition d;
    d.name = "canonical(" + f.name() + ")";
    d.params = f.params();
    d.f = [f, t0, f0, affine](double x) {
        if (x >= 0) return f.f(x);
        return affine ? t0 * x + f0 : kInf;
    };
    d.f_prime_right = [f, t0, affine](double x) {
        if (x >= 0) return f.f_prime_right(x);
        return affine ? t0 : -kInf;
    };
    d.f_prime_left = [f, t0, affine](double x) {
        if (x > 0) return f.f_prime_left(x);
        return affine ? t0 : -kInf;
    };
    if (affine)
        d.f_domain = Interval{};
    else
        d.f_domain = Interval{0.0, kInf, std::isfinite(f0), false};

    Interval dom = f.conj_domain();
    if (t0 > dom.lower) {
        dom.lower = t0;
        dom.lower_closed = std::isfinite(f0);
    }
    d.conj_domain = dom;
    d.conj = [f, dom](double t) {
        if (!dom.contains(t)) return kInf;
        return f.conj(t);
    };
    d.conj_prime = [f, dom](double t) {
        if (!dom.contains(t)) return kNaN;
        return f.conj_prime(t);
    };
    d.recession = f.recession();
    d.f_second_at_one = f.f_second_at_one();
    d.cond_I = f.cond_I();
    d.cond_II = f.cond_II();
    d.canonical = true;
    return DivergenceGenerator(std::move(d));
}

namespace {

// sup{ v in dom g* : g*(v) <= c } for canonical g (g* nondecreasing).
double conj_level_sup(const DivergenceGenerator& g, double c)
{
    const Interval& dom = g.conj_domain();
    double lo, hi;
    if (dom.bounded_below()) {
        lo = dom.lower_closed ? dom.lower : dom.lower + 1e-15 * (1 + std::abs(dom.lower));
        // tangent level at the bottom of the domain: bisection only resolves this to sqrt(eps)
        if (g.conj(lo) >= c && !(g.conj(lo + 1e-6 * (1 + std::abs(lo))) <= c)) return lo;
    } else {
        lo = -1.0;
        while (g.conj(lo) > c && lo > -1e300) lo = 2 * lo - 1;
    }
    if (dom.bounded_above()) {
        hi = dom.upper_closed ? dom.upper : dom.upper - 1e-15 * (1 + std::abs(dom.upper));
        if (g.conj(hi) <= c) return hi;
    } else {
        hi = std::max(lo, 0.0) + 1.0;
        while (g.conj(hi) <= c) {
            lo = hi;
            hi = 2 * hi + 1;
            if (hi > 1e300) return kInf;
        }
    }
    for (int it = 0; it < 400; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g.conj(mid) <= c)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

DivergenceGenerator generic_hat(const DivergenceGenerator& f)
{
    const DivergenceGenerator g = canonicalize(f);
    const double F0 = g.f(0.0);
    const double rec = g.recession();

    const Interval& gdom = g.conj_domain();
    double s0 = -kInf;
    if (gdom.bounded_above()) {
        double u = gdom.upper_closed ? gdom.upper : gdom.upper - 1e-12 * (1 + std::abs(gdom.upper));
        double v = g.conj(u);
        if (std::isfinite(v)) s0 = -v;
    }
    const bool affine = std::isfinite(s0) && std::isfinite(rec);

    GeneratorDefinition d;
    d.name = "hat(" + f.name() + ")";
    d.params = f.params();
    d.f = [g, rec, s0, affine](double x) {
        if (x > 0) {
            double v = g.f(1.0 / x);
            return std::isinf(v) ? v : x * v;
        }
        if (x == 0) return rec;
        return affine ? s0 * x + rec : kInf;
    };
    d.f_prime_right = [g, s0, affine](double x) {
        if (x > 0) return g.f(1.0 / x) - g.f_prime_left(1.0 / x) / x;
        if (x == 0) return s0;
        return affine ? s0 : -kInf;
    };
    d.f_prime_left = [g, s0, affine](double x) {
        if (x > 0) return g.f(1.0 / x) - g.f_prime_right(1.0 / x) / x;
        return affine ? s0 : -kInf;
    };
    if (affine)
        d.f_domain = Interval{};
    else
        d.f_domain = Interval{0.0, kInf, std::isfinite(rec), false};

    Interval dom;
    dom.lower = s0;
    dom.lower_closed = std::isfinite(s0) && std::isfinite(rec);
    dom.upper = F0;
    dom.upper_closed = std::isfinite(F0) && gdom.bounded_below();
    d.conj_domain = dom;
    d.conj = [g, dom](double s) {
        if (!dom.contains(s)) return kInf;
        return -conj_level_sup(g, -s);
    };
    d.conj_prime = [g, dom](double s) {
        if (!dom.contains(s)) return kNaN;
        double v = conj_level_sup(g, -s);
        double dv = g.conj_prime(v);
        return dv == 0 ? kInf : 1.0 / dv;
    };
    d.recession = F0;
    d.f_second_at_one = g.f_second_at_one();
    d.cond_I = g.cond_II();
    d.cond_II = g.cond_I();
    d.canonical = true;
    return DivergenceGenerator(std::move(d));
}

} // namespace

DivergenceGenerator hat(const DivergenceGenerator& f)
{
    if (f.name() == "renyi") return families::renyi(1.0 - *f.param("alpha"));
    if (f.name() == "kl") return families::reverse_kl();
    if (f.name() == "reverse-kl") return families::kl();
    if (f.name() == "tv") return families::total_variation();
    return generic_hat(f);
}

bool kernel_hypotheses_hold(const DivergenceGenerator& f)
{
    return f.canonical() && f.cond_I() && !f.conj_domain().bounded_below() && std::isfinite(f.f_at_zero());
}

namespace families {

DivergenceGenerator renyi(double alpha)
{
    if (!std::isfinite(alpha) || alpha == 0.0 || alpha == 1.0)
        throw InputError("renyi: alpha must be finite and not 0 or 1, got " + fmt_num(alpha));
    const double a = alpha;
    const double s = (a - 1) * a > 0 ? 1.0 : -1.0;

    GeneratorDefinition d;
    d.name = "renyi";
    d.params = {{"alpha", a}};
    d.f = [a, s](double x) {
        if (x > 0) return s * std::pow(x, a);
        if (x == 0) return a > 0 ? 0.0 : kInf;
        return a > 1 ? 0.0 : kInf;
    };
    d.f_prime_right = [a, s](double x) {
        if (x > 0) return s * a * std::pow(x, a - 1);
        return a > 1 ? 0.0 : -kInf;
    };
    d.f_prime_left = d.f_prime_right;

    if (a > 1) {
        d.f_domain = Interval{};
        d.conj_domain = Interval{0.0, kInf, true, false};
        d.conj = [a](double t) {
            if (t < 0) return kInf;
            if (t == 0) return 0.0;
            return (a - 1) / a * t * std::pow(t / a, 1 / (a - 1));
        };
        d.conj_prime = [a](double t) {
            if (t < 0) return kNaN;
            return std::pow(t / a, 1 / (a - 1));
        };
        d.recession = kInf;
    } else {
        d.f_domain = a > 0 ? Interval{0.0, kInf, true, false} : Interval{0.0, kInf, false, false};
        d.conj_domain = Interval{-kInf, 0.0, false, false};
        d.conj = [a, s](double t) {
            if (t >= 0) return kInf;
            return (a - 1) / a * t * std::pow(t / (s * a), 1 / (a - 1));
        };
        d.conj_prime = [a, s](double t) {
            if (t > 0) return kNaN;
            if (t == 0) return kInf;
            return std::pow(t / (s * a), 1 / (a - 1));
        };
        d.recession = 0.0;
    }
    d.f_second_at_one = s * a * (a - 1);
    d.cond_I = a <= 0.5 || a >= 2;
    d.cond_II = a >= 0.5 || a <= -1;
    return DivergenceGenerator(std::move(d));
}

DivergenceGenerator chi2() { return renyi(2.0); }
DivergenceGenerator fidelity() { return renyi(0.5); }

DivergenceGenerator kl()
{
    GeneratorDefinition d;
    d.name = "kl";
    d.f = [](double x) {
        if (x > 0) return x * std::log(x);
        return x == 0 ? 0.0 : kInf;
    };
    d.f_prime_right = [](double x) { return x > 0 ? std::log(x) + 1 : -kInf; };
    d.f_prime_left = d.f_prime_right;
    d.f_domain = Interval{0.0, kInf, true, false};
    d.conj = [](double t) { return std::exp(t - 1); };
    d.conj_prime = [](double t) { return std::exp(t - 1); };
    d.conj_domain = Interval{};
    d.recession = kInf;
    d.f_second_at_one = 1.0;
    d.cond_I = false;
    d.cond_II = true;
    return DivergenceGenerator(std::move(d));
}

DivergenceGenerator reverse_kl()
{
    GeneratorDefinition d;
    d.name = "reverse-kl";
    d.f = [](double x) { return x > 0 ? -std::log(x) : kInf; };
    d.f_prime_right = [](double x) { return x > 0 ? -1 / x : -kInf; };
    d.f_prime_left = d.f_prime_right;
    d.f_domain = Interval{0.0, kInf, false, false};
    d.conj = [](double t) { return t < 0 ? -1 - std::log(-t) : kInf; };
    d.conj_prime = [](double t) {
        if (t > 0) return kNaN;
        return t == 0 ? kInf : -1 / t;
    };
    d.conj_domain = Interval{-kInf, 0.0, false, false};
    d.recession = 0.0;
    d.f_second_at_one = 1.0;
    d.cond_I = true;
    d.cond_II = false;
    return DivergenceGenerator(std::move(d));
}

DivergenceGenerator total_variation()
{
    GeneratorDefinition d;
    d.name = "tv";
    d.f = [](double x) { return std::abs(1 - x); };
    d.f_prime_right = [](double x) { return x < 1 ? -1.0 : 1.0; };
    d.f_prime_left = [](double x) { return x <= 1 ? -1.0 : 1.0; };
    d.f_domain = Interval{};
    d.conj = [](double t) { return (t >= -1 && t <= 1) ? t : kInf; };
    d.conj_prime = [](double t) { return (t >= -1 && t <= 1) ? 1.0 : kNaN; };
    d.conj_domain = Interval{-1.0, 1.0, true, true};
    d.recession = 1.0;
    d.f_second_at_one = kNaN;  // kink at 1
    d.cond_I = true;
    d.cond_II = true;
    return DivergenceGenerator(std::move(d));
}

DivergenceGenerator fb()
{
    GeneratorDefinition d;
    d.name = "fb";
    d.f = [](double x) { return x >= 0 ? (x - 1) * (x - 1) : 1 - 2 * x; };
    d.f_prime_right = [](double x) { return x >= 0 ? 2 * (x - 1) : -2.0; };
    d.f_prime_left = [](double x) { return x > 0 ? 2 * (x - 1) : -2.0; };
    d.f_domain = Interval{};
    d.conj = [](double t) { return t >= -2 ? 0.25 * t * t + t : kInf; };
    d.conj_prime = [](double t) { return t >= -2 ? 0.5 * t + 1 : kNaN; };
    d.conj_domain = Interval{-2.0, kInf, true, false};
    d.recession = kInf;
    d.f_second_at_one = 2.0;
    d.cond_I = true;
    d.cond_II = false;
    return DivergenceGenerator(std::move(d));
}

bool is_renyi(const DivergenceGenerator& f, double alpha)
{
    if (f.name() != "renyi") return false;
    auto a = f.param("alpha");
    return a && *a == alpha;
}

} // namespace families

} // namespace qfdiv
