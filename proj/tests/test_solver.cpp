#include <gtest/gtest.h>

#include "discern/discern.hpp"
#include "oracles.hpp"

using namespace discern;

namespace {

oracle::Mat to_mat(const TransitionMatrix& b) {
    oracle::Mat m(b.size(), oracle::Vec(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m[i][j] = b(i, j);
    return m;
}

oracle::Vec to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double sup_gap(const Eigen::VectorXd& a, const oracle::Vec& b) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a(i) - b[std::size_t(i)]));
    return g;
}

std::vector<std::string> argmin_names(const EquilibriumSolution& sol, std::size_t k) {
    std::vector<std::string> out;
    for (auto t : sol.trading_types[k]) out.push_back(sol.type_names[t]);
    return out;
}

} // namespace

TEST(Supply, ThresholdAndMeanAddon) {
    const auto spec = scenarios::example_3_1();
    EXPECT_DOUBLE_EQ(pi_star(spec, 0, 0.0), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(mean_addon(spec, 0, 1.0 / 3.0), 2.0);
    EXPECT_THROW(mean_addon(spec, 0, 1.5), DomainError);
    const auto iv = addon_interval(spec, 1, 0.5);
    EXPECT_DOUBLE_EQ(iv.lo, 2.0);
    EXPECT_DOUBLE_EQ(iv.hi, 4.0);
    EXPECT_DOUBLE_EQ(price_from_addon(spec, 0, 2.0), 0.0);
}

TEST(MarketSpec, Validation) {
    const auto base = scenarios::example_3_1();
    Eigen::VectorXd mu(3);
    mu << 0.33, 0.33, 0.33;
    EXPECT_THROW(MarketSpec(base.space(), mu, base.S(), 2, 1, Variant::exploitative, base.types()), SpecError);
    Eigen::VectorXd s(3);
    s << 3, 4, 4;
    EXPECT_THROW(MarketSpec(base.space(), base.mu(), s, 2, 1, Variant::exploitative, base.types()), SpecError);
    EXPECT_THROW(MarketSpec(base.space(), base.mu(), base.S(), 1, 2, Variant::exploitative, base.types()), SpecError);
    EXPECT_THROW(MarketSpec(base.space(), base.mu(), base.S(), 2, 1, Variant::beneficial, base.types()), SpecError);
    EXPECT_THROW(base.with_types({}), SpecError);
    EXPECT_THROW(base.with_types({CognitiveType::coarse("a", {}), CognitiveType::coarse("a", {0})}), SpecError);
    EXPECT_THROW(base.with_types({CognitiveType::coarse("a", {4})}), SpecError);
}

TEST(Conditions, ExamplesSatisfyTheirConditions) {
    const auto c1 = check_conditions(scenarios::example_3_1());
    EXPECT_TRUE(c1.condition9);
    EXPECT_TRUE(c1.ree_condition);
    const auto c2 = check_conditions(scenarios::example_4_beneficial());
    EXPECT_TRUE(c2.condition16);
    EXPECT_TRUE(c2.ree_condition);
}

TEST(Solver, ThreeStateExampleClosedForm) {
    const auto spec = scenarios::example_3_1();
    const auto sol = solve(spec);
    EXPECT_LE(sup_gap(sol.q_bar, oracle::three_state_example(3.0, 4.0, 4.01, 1.0)), 1e-9);
    EXPECT_EQ(argmin_names(sol, 0), std::vector<std::string>{"rational"});
    EXPECT_EQ(argmin_names(sol, 1), std::vector<std::string>{"only_t1"});
    EXPECT_EQ(argmin_names(sol, 2), std::vector<std::string>{"only_t2"});
    EXPECT_TRUE(sol.all_interior());
    EXPECT_LE(sol.diagnostics.residual, 1e-11);
    EXPECT_LE(sol.diagnostics.cross_check_gap, 1e-9);
}

TEST(Solver, ChainDagsReproduceTheCoarseSolution) {
    const auto a = solve(scenarios::example_3_1());
    const auto b = solve(scenarios::example_5_2());
    EXPECT_LE((a.q_bar - b.q_bar).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Solver, BeneficialExampleClosedForms) {
    const auto one = solve(scenarios::example_4_beneficial_coarse());
    const auto two = solve(scenarios::example_4_beneficial());
    EXPECT_LE(sup_gap(one.q_bar, oracle::beneficial_coarse(0.9, -1.2)), 1e-9);
    EXPECT_LE(sup_gap(two.q_bar, oracle::beneficial_with_rational(0.9, -1.2)), 1e-9);
    EXPECT_GT(two.q_bar(0), one.q_bar(0));
    EXPECT_LT(two.q_bar(1), one.q_bar(1));
}

TEST(Solver, MatchesExhaustiveOracle) {
    random::Rng rng(123);
    for (int trial = 0; trial < 30; ++trial) {
        const auto spec = random::random_exploitative_spec(rng);
        const auto betas = types_to_betas(spec.types(), spec.space(), spec.mu());
        std::vector<oracle::Mat> mats;
        for (const auto& b : betas) mats.push_back(to_mat(b));
        const auto want = oracle::exhaustive_fixed_point(to_vec(spec.S()), spec.delta(), mats);
        const auto vi = value_iteration(spec, betas, 1e-13, 1000);
        EXPECT_LE(sup_gap(vi.q_bar, want), 1e-9);
        EXPECT_LE(sup_gap(policy_iteration(spec, betas).q_bar, want), 1e-9);
        EXPECT_LE(sup_gap(brute_force_oracle(spec, betas), want), 1e-9);
    }
}

TEST(Solver, BellmanOperatorIsAHalfContraction) {
    random::Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto spec = trial % 2 ? random::random_exploitative_spec(rng) : random::random_beneficial_spec(rng);
        const auto betas = types_to_betas(spec.types(), spec.space(), spec.mu());
        const auto n = Eigen::Index(spec.num_states());
        const Eigen::VectorXd x = Eigen::VectorXd::Random(n) * 5.0, y = Eigen::VectorXd::Random(n) * 5.0;
        const double lhs = (bellman_operator(x, spec, betas) - bellman_operator(y, spec, betas)).cwiseAbs().maxCoeff();
        EXPECT_LE(lhs, 0.5 * (x - y).cwiseAbs().maxCoeff() + 1e-12);
    }
}

TEST(Solver, BeneficialOperatorMatchesOracle) {
    const auto spec = scenarios::example_4_beneficial();
    const auto betas = types_to_betas(spec.types(), spec.space(), spec.mu());
    std::vector<oracle::Mat> mats;
    for (const auto& b : betas) mats.push_back(to_mat(b));
    const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(2, 0.3, 0.9);
    const auto want = oracle::bellman(to_vec(q), to_vec(spec.S()), spec.delta(), mats, -1.0);
    EXPECT_LE(sup_gap(bellman_operator(q, spec, betas), want), 1e-14);
}

TEST(Solver, SingleRationalTypeGivesRee) {
    const auto spec = scenarios::example_3_1().with_types({CognitiveType::coarse("r", {0, 1})});
    const auto sol = solve(spec);
    const auto ree = ree_solution(spec);
    EXPECT_LE((sol.q_bar - ree.q_bar).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((sol.h.array() - (spec.v_star() + spec.delta() - spec.S().array())).abs().maxCoeff(), 1e-9);
}

TEST(Solver, ReeFailsWhenDeltaTooLarge) {
    const auto base = scenarios::example_3_1();
    const MarketSpec spec(base.space(), base.mu(), base.S(), 3.0, 1.0, Variant::exploitative, base.types());
    EXPECT_THROW(ree_solution(spec), NoInteriorEquilibrium);
    EXPECT_THROW(solve(spec), NoInteriorEquilibrium);
}

TEST(Solver, ConvergenceFailureIsReported) {
    SolverOptions opt;
    opt.max_iter = 2;
    opt.cross_check = false;
    EXPECT_THROW(solve(scenarios::example_3_1(), opt), ConvergenceFailure);
}

TEST(Solver, PolicyIterationRejectsBeneficial) {
    const auto spec = scenarios::example_4_beneficial();
    const auto betas = types_to_betas(spec.types(), spec.space(), spec.mu());
    EXPECT_THROW(policy_iteration(spec, betas), Unsupported);
    EXPECT_THROW(brute_force_oracle(spec, betas), Unsupported);
}

TEST(Solver, BoundsOnRandomSweep) {
    random::Rng rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        const auto spec = random::random_exploitative_spec(rng);
        const auto sol = solve(spec);
        for (std::size_t k = 0; k < spec.num_states(); ++k) {
            const double q = sol.q_bar(Eigen::Index(k));
            EXPECT_GE(q, spec.s_min() - spec.delta() - 1e-9);
            EXPECT_LE(q, spec.s_max() - spec.delta() + 1e-9);
        }
    }
}

TEST(Solver, BeneficialUniqueFromRandomStarts) {
    random::Rng rng(17);
    const auto spec = random::random_beneficial_spec(rng);
    const auto betas = types_to_betas(spec.types(), spec.space(), spec.mu());
    const auto ref = value_iteration(spec, betas, 1e-13, 2000).q_bar;
    for (int i = 0; i < 10; ++i) {
        const Eigen::VectorXd start = Eigen::VectorXd::Random(Eigen::Index(spec.num_states())) * 10.0;
        EXPECT_LE((value_iteration(spec, betas, 1e-13, 2000, start).q_bar - ref).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Welfare, ExploitativeFormulas) {
    const auto spec = scenarios::example_3_1();
    const auto sol = solve(spec);
    for (Eigen::Index k = 0; k < 3; ++k) {
        EXPECT_NEAR(sol.welfare.social_surplus(k), (1.0 - sol.pi_star(k)) * spec.delta(), 1e-12);
        EXPECT_NEAR(sol.welfare.trading_consumer_net_payoff(k), spec.delta() - spec.S().coeff(k) + sol.q_bar(k), 1e-12);
    }
}

TEST(Revelation, TiesAreDetected) {
    const auto sol = solve(scenarios::example_4_beneficial_coarse());
    EXPECT_FALSE(sol.revelation.ok);
    EXPECT_EQ(sol.revelation.collisions.size(), 1u);
    EXPECT_TRUE(solve(scenarios::example_3_1()).revelation.ok);
}
