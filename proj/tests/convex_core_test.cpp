#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qfdiv/convex_core.hpp"
#include "qfdiv/matrix_calc.hpp"
#include "ensembles.hpp"
#include "oracles.hpp"

using namespace qfdiv;
using qfdiv::testing::Rng;

namespace {

std::vector<DivergenceGenerator> builtin_families()
{
    std::vector<DivergenceGenerator> v;
    for (double a : {-2.0, -1.0, -0.5, 0.1, 0.3, 0.5, 0.7, 1.5, 2.0, 3.0}) v.push_back(families::renyi(a));
    v.push_back(families::kl());
    v.push_back(families::reverse_kl());
    v.push_back(families::total_variation());
    v.push_back(families::fb());
    return v;
}

// same callbacks under another name, so hat() takes the generic route
DivergenceGenerator renamed(const DivergenceGenerator& f, const std::string& name)
{
    GeneratorDefinition d = f.definition();
    d.name = name;
    return DivergenceGenerator(d);
}

DivergenceGenerator numeric_conjugate_copy(const DivergenceGenerator& f)
{
    GeneratorDefinition d = f.definition();
    d.name = f.name() + "-numeric";
    d.conj = nullptr;
    d.conj_prime = nullptr;
    return DivergenceGenerator(d);
}

// |1 - lambda| restricted to lambda >= 0: not canonical
DivergenceGenerator raw_tv()
{
    GeneratorDefinition d;
    d.name = "raw-tv";
    d.f = [](double x) { return x >= 0 ? std::abs(1 - x) : kInf; };
    d.f_prime_right = [](double x) { return x < 0 ? -kInf : (x < 1 ? -1.0 : 1.0); };
    d.f_prime_left = [](double x) { return x <= 0 ? -kInf : (x <= 1 ? -1.0 : 1.0); };
    d.f_domain = Interval{0.0, kInf, true, false};
    d.conj_domain = Interval{-kInf, 1.0, false, true};
    d.canonical = false;
    d.cond_I = true;
    d.cond_II = true;
    return DivergenceGenerator(d);
}

// lambda^2 on the whole line: conjugate t^2/4 is not increasing
DivergenceGenerator raw_square()
{
    GeneratorDefinition d;
    d.name = "raw-square";
    d.f = [](double x) { return x * x; };
    d.f_prime_right = [](double x) { return 2 * x; };
    d.f_prime_left = d.f_prime_right;
    d.f_domain = Interval{};
    d.conj = [](double t) { return 0.25 * t * t; };
    d.conj_prime = [](double t) { return 0.5 * t; };
    d.conj_domain = Interval{};
    d.canonical = false;
    return DivergenceGenerator(d);
}

double sample_in(const Interval& d, Rng& rng)
{
    double lo = d.bounded_below() ? d.lower : -6.0;
    double hi = d.bounded_above() ? d.upper : 6.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x;
    do {
        x = lo + (hi - lo) * u(rng);
    } while (!d.contains(x));
    return x;
}

} // namespace

TEST(GEval, TotalVariationSubstitution) { EXPECT_DOUBLE_EQ(g_eval(families::total_variation(), 2, 1), 1.0); }

TEST(GEval, OriginIsZeroForEveryFamily)
{
    for (const auto& f : builtin_families()) EXPECT_EQ(g_eval(f, 0, 0), 0.0) << f.name();
}

TEST(GEval, FidelityRecessionLimitIsZero)
{
    auto f = families::fidelity();
    EXPECT_EQ(g_eval(f, 1, 0), 0.0);
    // s f(1/s) = -sqrt(s) shrinks towards the limit
    double prev = -1;
    for (double s : {1e-6, 1e-8, 1e-10, 1e-12}) {
        double v = s * f.f(1 / s);
        EXPECT_NEAR(v, -std::sqrt(s), 1e-15);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(GEval, RecessionValuesPerFamily)
{
    EXPECT_EQ(g_eval(families::chi2(), 0.5, 0), kInf);
    EXPECT_EQ(g_eval(families::kl(), 0.5, 0), kInf);
    EXPECT_EQ(g_eval(families::fb(), 0.5, 0), kInf);
    EXPECT_EQ(g_eval(families::reverse_kl(), 0.5, 0), 0.0);
    EXPECT_EQ(g_eval(families::renyi(-1), 0.5, 0), 0.0);
    EXPECT_DOUBLE_EQ(g_eval(families::total_variation(), 0.5, 0), 0.5);
    EXPECT_EQ(g_eval(families::kl(), 0.5, -1), kInf);
}

TEST(GEval, NegativeFirstArgumentOutsideDomain)
{
    EXPECT_EQ(g_eval(families::kl(), -0.5, 1), kInf);
    // fb is finite on the negative axis: 1 * (1 - 2(-0.5)) = 2
    EXPECT_DOUBLE_EQ(g_eval(families::fb(), -0.5, 1), 2.0);
}

TEST(ClassicalDf, ChiSquareExample)
{
    EXPECT_NEAR(classical_df(families::chi2(), DiscreteMeasure({0.7, 0.3}), DiscreteMeasure({0.5, 0.5})), 1.16, 1e-15);
}

TEST(ClassicalDf, IdenticalArgumentsGiveFOfOne)
{
    EXPECT_EQ(classical_df(families::kl(), DiscreteMeasure({0.5, 0.5}), DiscreteMeasure({0.5, 0.5})), 0.0);
}

TEST(ClassicalDf, TotalVariationOfDisjointPoints)
{
    EXPECT_DOUBLE_EQ(classical_df(families::total_variation(), DiscreteMeasure({1, 0}), DiscreteMeasure({0, 1})), 2.0);
}

TEST(ClassicalDf, LengthMismatchIsInputError)
{
    EXPECT_THROW(classical_df(families::kl(), DiscreteMeasure({1}), DiscreteMeasure({0.5, 0.5})), InputError);
    EXPECT_THROW(DiscreteMeasure({0.5, -0.1}), InputError);
}

TEST(Conjugate, ClosedFormExamples)
{
    EXPECT_DOUBLE_EQ(conjugate_eval(families::chi2(), 2), 1.0);
    EXPECT_DOUBLE_EQ(conjugate_eval(families::fidelity(), -1), 0.25);
    EXPECT_DOUBLE_EQ(conjugate_eval(families::total_variation(), 0), 0.0);
    EXPECT_EQ(conjugate_eval(families::chi2(), -0.1), kInf);
    EXPECT_EQ(conjugate_eval(families::fidelity(), 0.0), kInf);
    EXPECT_EQ(conjugate_eval(families::total_variation(), 1.5), kInf);
    EXPECT_EQ(conjugate_eval(families::fb(), -2.5), kInf);
    EXPECT_DOUBLE_EQ(conjugate_eval(families::fb(), -2.0), -1.0);
}

TEST(Conjugate, ReverseKlMatchesLogForm)
{
    auto f = families::reverse_kl();
    for (double t : {-3.0, -1.0, -0.2}) EXPECT_NEAR(f.conj(t), -1 - std::log(-t), 1e-15);
}

TEST(Conjugate, NumericMatchesClosedForm)
{
    for (const auto& f : {families::fb(), families::kl(), families::renyi(0.3), families::renyi(2.5),
                          families::reverse_kl(), families::total_variation()}) {
        auto g = numeric_conjugate_copy(f);
        Rng rng(11);
        for (int i = 0; i < 20; ++i) {
            double t = sample_in(f.conj_domain(), rng);
            EXPECT_NEAR(g.conj(t), f.conj(t), 1e-9 * (1 + std::abs(f.conj(t)))) << f.name() << " t=" << t;
        }
    }
}

TEST(Generator, FenchelYoungOnRandomGrid)
{
    Rng rng(1);
    std::uniform_real_distribution<double> lam(0.01, 10.0);
    for (const auto& f : builtin_families()) {
        for (int i = 0; i < 100; ++i) {
            double l = lam(rng);
            double t = sample_in(f.conj_domain(), rng);
            EXPECT_GE(f.f(l) + f.conj(t) - l * t, -1e-10) << f.name();
        }
    }
}

TEST(Generator, FenchelYoungEqualityAtTheDerivative)
{
    for (const auto& f : builtin_families()) {
        if (f.name() == "tv") continue;
        for (double l : {0.2, 0.9, 1.7, 4.0}) {
            double t = f.f_prime_right(l);
            EXPECT_NEAR(f.f(l) + f.conj(t), l * t, 1e-10 * (1 + std::abs(l * t))) << f.name() << " at " << l;
        }
    }
}

TEST(Generator, BiconjugationRecoversF)
{
    std::vector<DivergenceGenerator> fams = builtin_families();
    fams.push_back(hat(families::fb()));
    fams.push_back(canonicalize(raw_square()));
    for (const auto& f : fams) {
        for (double l = 0.1; l <= 10.0; l *= 1.6) {
            double b = qfdiv::testing::biconjugate(f, l);
            EXPECT_NEAR(b, f.f(l), 1e-8 * (1 + std::abs(f.f(l)))) << f.name() << " at " << l;
        }
    }
}

TEST(Generator, ReversalConsistencyOnRandomMeasures)
{
    Rng rng(5);
    std::uniform_int_distribution<int> len(1, 8);
    std::vector<DivergenceGenerator> fams = builtin_families();
    fams.push_back(renamed(families::kl(), "kl-generic"));
    for (const auto& f : fams) {
        DivergenceGenerator fh = hat(f);
        for (int trial = 0; trial < 25; ++trial) {
            std::size_t n = len(rng);
            int zeros = trial % 3 == 0 ? 1 : 0;
            auto p1 = qfdiv::testing::random_weights(n, rng, zeros);
            auto p2 = qfdiv::testing::random_weights(n, rng, trial % 5 == 0 ? 1 : 0);
            double a = classical_df(f, DiscreteMeasure(p1), DiscreteMeasure(p2));
            double b = classical_df(fh, DiscreteMeasure(p2), DiscreteMeasure(p1));
            if (!std::isfinite(a) || !std::isfinite(b)) {
                EXPECT_EQ(a, b) << f.name();
                continue;
            }
            EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << f.name();
        }
    }
}

TEST(Hat, RenyiMapsToComplementaryOrder)
{
    auto g = hat(families::renyi(0.3));
    EXPECT_EQ(g.name(), "renyi");
    EXPECT_DOUBLE_EQ(*g.param("alpha"), 0.7);
}

TEST(Hat, TotalVariationIsSelfReverse)
{
    auto g = hat(families::total_variation());
    for (double l : {0.0, 0.3, 1.0, 2.5}) EXPECT_DOUBLE_EQ(g.f(l), std::abs(l - 1));
}

TEST(Hat, GenericKlReversalMatchesLogForm)
{
    auto g = hat(renamed(families::kl(), "kl-generic"));
    EXPECT_EQ(g.name(), "hat(kl-generic)");
    for (double l : {0.1, 0.5, 2.0, 7.0}) EXPECT_NEAR(g.f(l), -std::log(l), 1e-14);
    for (double t : {-4.0, -1.0, -0.3}) EXPECT_NEAR(g.conj(t), -1 - std::log(-t), 1e-12) << t;
    EXPECT_EQ(g.conj(0.1), kInf);
    EXPECT_TRUE(g.cond_I());
    EXPECT_FALSE(g.cond_II());
}

TEST(Hat, GenericFbReversal)
{
    // lambda f_b(1/lambda) = 1/lambda - 2 + lambda; conjugate 2 - 2 sqrt(1 - s) on s <= 1
    auto g = hat(families::fb());
    for (double l : {0.25, 1.0, 3.0}) EXPECT_NEAR(g.f(l), 1 / l - 2 + l, 1e-14);
    for (double s : {-5.0, -1.0, 0.0, 0.5, 1.0}) EXPECT_NEAR(g.conj(s), 2 - 2 * std::sqrt(1 - s), 1e-12) << s;
    EXPECT_EQ(g.conj(1.01), kInf);
    EXPECT_EQ(g.f_at_zero(), kInf);
    EXPECT_DOUBLE_EQ(g.recession(), 1.0);
}

TEST(Canonicalize, RawTotalVariationBecomesTwoSided)
{
    auto f0 = canonicalize(raw_tv());
    EXPECT_TRUE(f0.canonical());
    for (double l : {-2.0, -0.5, 0.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(f0.f(l), std::abs(1 - l));
    EXPECT_DOUBLE_EQ(f0.conj_domain().lower, -1.0);
    EXPECT_EQ(f0.conj(-2.0), kInf);
    EXPECT_NEAR(f0.conj(0.5), 0.5, 1e-12);
    // the raw conjugate is flat at -1 to the left of -1
    EXPECT_NEAR(raw_tv().conj(-3.0), -1.0, 1e-12);
}

TEST(Canonicalize, FidelityIsUnchanged)
{
    auto f = families::fidelity();
    auto f0 = canonicalize(f);
    EXPECT_EQ(f0.f(-0.5), kInf);
    EXPECT_DOUBLE_EQ(f0.f(0.49), f.f(0.49));
}

TEST(Canonicalize, SquareOnTheLine)
{
    auto f0 = canonicalize(raw_square());
    EXPECT_EQ(f0.f(-1.0), 0.0);
    EXPECT_EQ(f0.f(-7.0), 0.0);
    EXPECT_DOUBLE_EQ(f0.f(1.5), 2.25);
    EXPECT_EQ(f0.conj(-0.5), kInf);
    auto chi = families::chi2();
    for (double t : {0.0, 0.5, 2.0, 9.0}) EXPECT_DOUBLE_EQ(f0.conj(t), chi.conj(t));
    EXPECT_TRUE(f0.conj_domain().lower_closed);
    EXPECT_EQ(f0.conj_domain().lower, 0.0);
}

TEST(Canonicalize, Idempotent)
{
    for (const auto& raw : {raw_tv(), raw_square()}) {
        auto once = canonicalize(raw);
        auto twice = canonicalize(once);
        for (double l = -3; l <= 3; l += 0.25) EXPECT_EQ(once.f(l), twice.f(l));
        for (double t = -3; t <= 3; t += 0.25) EXPECT_EQ(once.conj(t), twice.conj(t));
    }
}

TEST(Generator, ConditionFlagsForRenyi)
{
    struct Row { double a; bool c1, c2; };
    for (auto r : {Row{-2, true, true}, Row{-1, true, true}, Row{-0.5, true, false}, Row{0.3, true, false},
                   Row{0.5, true, true}, Row{0.7, false, true}, Row{1.5, false, true}, Row{2, true, true},
                   Row{3, true, true}}) {
        auto f = families::renyi(r.a);
        EXPECT_EQ(f.cond_I(), r.c1) << r.a;
        EXPECT_EQ(f.cond_II(), r.c2) << r.a;
        EXPECT_EQ(hat(f).cond_I(), f.cond_II()) << r.a;
    }
    EXPECT_FALSE(families::kl().cond_I());
    EXPECT_TRUE(families::kl().cond_II());
    EXPECT_TRUE(families::fb().cond_I());
}

TEST(Generator, SecondDerivativeAtOne)
{
    for (double a : {-1.0, 0.3, 0.5, 2.0, 3.0}) EXPECT_NEAR(families::renyi(a).f_second_at_one(), std::abs(a * (a - 1)), 1e-15);
    EXPECT_DOUBLE_EQ(families::fb().f_second_at_one(), 2.0);
    EXPECT_DOUBLE_EQ(families::kl().f_second_at_one(), 1.0);
}

TEST(Generator, RejectsImproperDefinitions)
{
    EXPECT_THROW(families::renyi(0.0), InputError);
    EXPECT_THROW(families::renyi(1.0), InputError);
    GeneratorDefinition d;
    d.name = "empty";
    d.f = [](double x) { return x > 5 ? 0.0 : kInf; };
    d.f_prime_right = [](double) { return 0.0; };
    d.f_prime_left = d.f_prime_right;
    EXPECT_THROW(DivergenceGenerator{d}, InputError);
}

TEST(Generator, KernelHypotheses)
{
    EXPECT_TRUE(kernel_hypotheses_hold(families::renyi(0.3)));
    EXPECT_TRUE(kernel_hypotheses_hold(families::fidelity()));
    EXPECT_FALSE(kernel_hypotheses_hold(families::renyi(-1)));  // f(0) = inf
    EXPECT_FALSE(kernel_hypotheses_hold(families::chi2()));     // dom f* bounded below
    EXPECT_FALSE(kernel_hypotheses_hold(families::fb()));
    EXPECT_FALSE(kernel_hypotheses_hold(families::kl()));       // not cond_I
}

TEST(Generator, ConjugateOperatorMonotone)
{
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double a : {0.1, 0.3, 0.5}) {
        auto f = families::renyi(a);
        ScalarMap h{[f](double t) { return f.conj(t); }, [f](double t) { return f.conj_prime(t); }, f.conj_domain()};
        for (int trial = 0; trial < 30; ++trial) {
            Eigen::Index n = 2 + trial % 3;
            Matrix v = qfdiv::testing::random_state(n, rng).eigenvectors();
            RealVector spec(n);
            for (Eigen::Index i = 0; i < n; ++i) spec(i) = -0.2 - 4.8 * u(rng);
            Matrix b = v * spec.cast<std::complex<double>>().asDiagonal() * v.adjoint();
            Matrix p = qfdiv::testing::random_state(n, rng).matrix() * 0.1;  // ||p|| < 0.2 keeps A < 0
            HermitianOperator bo(0.5 * (b + b.adjoint()));
            HermitianOperator ao(0.5 * (b + p + (b + p).adjoint()));
            Matrix diff = op_func(h, ao).matrix() - op_func(h, bo).matrix();
            double mn = hermitian_spectrum(hermitian_part(diff)).values(0);
            EXPECT_GE(mn, -1e-8) << "alpha=" << a;
        }
    }
}
