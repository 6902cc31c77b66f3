#include <gtest/gtest.h>

#include <numeric>

#include "discern/discern.hpp"
#include "oracles.hpp"

using namespace discern;

namespace {

std::vector<std::vector<std::size_t>> tuples(const StateSpace& s) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t k = 0; k < s.size(); ++k) out.emplace_back(s.state(k).begin(), s.state(k).end());
    return out;
}

oracle::Vec to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void expect_matrix_near(const TransitionMatrix& b, const oracle::Mat& want, double tol) {
    ASSERT_EQ(b.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
        for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(b(i, j), want[i][j], tol) << i << "," << j;
}

StateSpace three_states() { return StateSpace(binary_variables(2), {{0, 0}, {0, 1}, {1, 0}}); }

Eigen::VectorXd uniform(std::size_t n) { return Eigen::VectorXd::Constant(Eigen::Index(n), 1.0 / double(n)); }

} // namespace

// ---- state space -----------------------------------------------------------

TEST(StateSpace, FullProductIsLexicographic) {
    StateSpace s(binary_variables(2));
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s.label(0), "(0,0)");
    EXPECT_EQ(s.label(1), "(0,1)");
    EXPECT_EQ(s.label(3), "(1,1)");
    EXPECT_TRUE(s.is_full_product());
}

TEST(StateSpace, ExplicitSupportIsSortedAndIndexed) {
    StateSpace s(binary_variables(2), {{1, 0}, {0, 0}, {0, 1}});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.label(2), "(1,0)");
    EXPECT_EQ(*s.index_of({0, 1}), 1u);
    EXPECT_FALSE(s.index_of({1, 1}).has_value());
    EXPECT_FALSE(s.is_full_product());
}

TEST(StateSpace, RejectsBadInput) {
    EXPECT_THROW(StateSpace(binary_variables(2), {{0, 0}, {0, 0}}), SpecError);
    EXPECT_THROW(StateSpace(binary_variables(2), {{0, 2}, {0, 0}}), SpecError);
    EXPECT_THROW(StateSpace(binary_variables(2), {{0, 0}}), SpecError);
    EXPECT_THROW(StateSpace({Variable{"a", {"x"}}, Variable{"a", {"y", "z"}}}), SpecError);
    EXPECT_THROW(StateSpace({Variable{"a", {}}}), SpecError);
}

TEST(StateSpace, AgreeOn) {
    StateSpace s(binary_variables(2));
    const std::vector<std::size_t> first{0}, none{};
    EXPECT_TRUE(s.agree_on(0, 1, first));
    EXPECT_FALSE(s.agree_on(0, 2, first));
    EXPECT_TRUE(s.agree_on(0, 3, none));
}

// ---- DAG validation and blocking -----------------------------------------

TEST(Dag, ValidatesStructure) {
    EXPECT_TRUE(validate_dag(chain_dag({0, 1}), 2).empty());
    CausalDag no_q;
    no_q.add_state(0, "t1");
    no_q.add_price();
    EXPECT_FALSE(validate_dag(no_q, 1).empty());

    CausalDag bad = chain_dag({0, 1});
    bad.add_edge(bad.price_node(), *bad.state_node(0));
    EXPECT_FALSE(validate_dag(bad, 2).empty());

    CausalDag cyc;
    auto a = cyc.add_state(0, "a"), b = cyc.add_state(1, "b");
    cyc.add_price();
    cyc.add_addon();
    cyc.add_edge(a, b);
    cyc.add_edge(b, a);
    EXPECT_FALSE(validate_dag(cyc, 2).empty());
    EXPECT_THROW(require_valid(cyc, 2), DomainError);

    CausalDag sig = scenarios::extended_short_chain(0);
    EXPECT_TRUE(validate_dag(sig, 2).empty());
    sig.add_edge(*sig.signal_node(), sig.addon_node());
    EXPECT_FALSE(validate_dag(sig, 2).empty());
}

TEST(Dag, PerfectNess) {
    EXPECT_TRUE(is_perfect(chain_dag({0, 1, 2})));
    EXPECT_TRUE(is_perfect(encode_coarse({0, 1, 2})));
    CausalDag v;
    auto a = v.add_state(0, "a"), b = v.add_state(1, "b");
    auto phi = v.add_price();
    v.add_addon();
    v.add_edge(a, phi);
    v.add_edge(b, phi);
    EXPECT_FALSE(is_perfect(v));
}

TEST(Dag, BlockingOnShortChainWithSignal) {
    const auto g1 = scenarios::extended_short_chain(0);
    const auto w = *g1.signal_node(), q = g1.addon_node();
    EXPECT_FALSE(blocks(g1, {*g1.state_node(0)}, w, q));
    EXPECT_TRUE(blocks(g1, {*g1.state_node(1)}, w, q));
    EXPECT_TRUE(blocks(g1, {*g1.state_node(1)}, q, w));
    EXPECT_THROW(blocks(g1, {q}, w, q), DomainError);
}

TEST(Dag, BlockingIsMonotoneInTheCut) {
    random::Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = random::random_perfect_dag(rng, 3);
        const auto phi = g.price_node(), q = g.addon_node();
        std::vector<std::size_t> cut;
        bool was_blocked = blocks(g, cut, phi, q);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (i == phi || i == q) continue;
            cut.push_back(i);
            const bool now = blocks(g, cut, phi, q);
            EXPECT_TRUE(!was_blocked || now);
            was_blocked = now;
        }
    }
}

// ---- factorization --------------------------------------------------------

TEST(Factorize, CompleteDagReproducesTheJoint) {
    const auto g = encode_coarse({0, 1});
    StateSpace s(binary_variables(2));
    random::Rng rng(3);
    const auto mu = random::random_mu(rng, s.size());
    Eigen::MatrixXd law(4, 2);
    law << 0.2, 0.8, 0.5, 0.5, 0.9, 0.1, 0.3, 0.7;
    const Table joint = fully_revealing_joint(g, s, mu, law);
    const Table pg = factorize(g, joint);
    for (std::size_t i = 0; i < joint.size(); ++i) EXPECT_NEAR(pg[i], joint[i], 1e-12);
}

TEST(Factorize, RejectsUnnormalizedJoint) {
    const auto g = chain_dag({0});
    Table t({2, 2, 2});
    t[0] = 0.5;
    EXPECT_THROW(factorize(g, t), DomainError);
}

// ---- beliefs ---------------------------------------------------------------

TEST(Beliefs, ChainDagOnThreeStatesMatchesClosedForm) {
    const auto s = three_states();
    const auto beta = dag_to_beta(chain_dag({0, 1}), s, uniform(3));
    // rows: (0,0), (0,1), (1,0)
    expect_matrix_near(beta, {{0.25, 0.5, 0.25}, {0.25, 0.5, 0.25}, {0.5, 0.0, 0.5}}, 1e-12);
    expect_matrix_near(beta, oracle::chain2_beta(tuples(s), to_vec(uniform(3)), 0, 1), 1e-12);
}

TEST(Beliefs, ReversedChainMatchesClosedForm) {
    const auto s = three_states();
    const auto beta = dag_to_beta(chain_dag({1, 0}), s, uniform(3));
    expect_matrix_near(beta, {{0.25, 0.25, 0.5}, {0.5, 0.5, 0.0}, {0.25, 0.25, 0.5}}, 1e-12);
    expect_matrix_near(beta, oracle::chain2_beta(tuples(s), to_vec(uniform(3)), 1, 0), 1e-12);
}

TEST(Beliefs, ChainFormulaOnRandomMu) {
    StateSpace s(binary_variables(2));
    random::Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mu = random::random_mu(rng, s.size());
        expect_matrix_near(dag_to_beta(chain_dag({0, 1}), s, mu), oracle::chain2_beta(tuples(s), to_vec(mu), 0, 1),
                           1e-12);
        expect_matrix_near(dag_to_beta(chain_dag({1, 0}), s, mu), oracle::chain2_beta(tuples(s), to_vec(mu), 1, 0),
                           1e-12);
    }
}

TEST(Beliefs, CoarseMatchesOracleAndDagEncoding) {
    StateSpace s(binary_variables(3));
    random::Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mu = random::random_mu(rng, s.size());
        const auto vars = random::random_subset(rng, 3);
        const auto coarse = coarse_to_beta(s, mu, vars);
        expect_matrix_near(coarse, oracle::coarse_beta(tuples(s), to_vec(mu), vars), 1e-12);
        expect_matrix_near(dag_to_beta(encode_coarse(vars), s, mu), oracle::coarse_beta(tuples(s), to_vec(mu), vars),
                           1e-12);
    }
}

TEST(Beliefs, RationalAndFullyCoarseExtremes) {
    StateSpace s(binary_variables(2));
    random::Rng rng(1);
    const auto mu = random::random_mu(rng, s.size());
    EXPECT_TRUE(coarse_to_beta(s, mu, {0, 1}).is_identity());
    const auto empty = coarse_to_beta(s, mu, {});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(empty(i, j), mu(Eigen::Index(j)), 1e-15);
}

TEST(Beliefs, PriceLinkedToAddonIsRational) {
    CausalDag g;
    auto phi = g.add_price();
    auto q = g.add_addon();
    g.add_edge(phi, q);
    StateSpace s(binary_variables(2));
    random::Rng rng(2);
    EXPECT_TRUE(dag_to_beta(g, s, random::random_mu(rng, 4)).is_identity());
    EXPECT_TRUE(is_rational(CognitiveType::from_dag("direct", g), s, random::random_mu(rng, 4)));
}

TEST(Beliefs, IndependentOfLabelChoice) {
    StateSpace s(binary_variables(3));
    random::Rng rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        const auto g = random::random_perfect_dag(rng, 3);
        const auto mu = random::random_mu(rng, s.size());
        std::vector<std::size_t> a(s.size()), b(s.size());
        std::iota(a.begin(), a.end(), std::size_t{0});
        std::iota(b.begin(), b.end(), std::size_t{0});
        std::shuffle(a.begin(), a.end(), rng);
        std::shuffle(b.begin(), b.end(), rng);
        const auto base = dag_to_beta(g, s, mu);
        const auto relabeled = dag_to_beta_labeled(g, s, mu, a, b);
        EXPECT_LT((base.matrix() - relabeled.matrix()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Beliefs, RepresentsDistortedAddonBelief) {
    // p_G(q | phi = state k) = sum_k' beta(k' | k) p(q | k') for any add-on law.
    StateSpace s(binary_variables(3));
    random::Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random::random_perfect_dag(rng, 3);
        const auto mu = random::random_mu(rng, s.size());
        Eigen::MatrixXd law = Eigen::MatrixXd::Random(Eigen::Index(s.size()), 4).array().abs() + 0.05;
        for (Eigen::Index r = 0; r < law.rows(); ++r) law.row(r) /= law.row(r).sum();
        const Table pg = factorize(g, fully_revealing_joint(g, s, mu, law));
        const std::vector<std::size_t> axes{g.price_node(), g.addon_node()};
        const Table m = pg.marginal(axes);
        const Eigen::MatrixXd predicted = dag_to_beta(g, s, mu).matrix() * law;
        for (std::size_t k = 0; k < s.size(); ++k) {
            double z = 0.0;
            for (std::size_t x = 0; x < 4; ++x) z += m.at(std::vector<std::size_t>{k, x});
            for (std::size_t x = 0; x < 4; ++x)
                EXPECT_NEAR(m.at(std::vector<std::size_t>{k, x}) / z, predicted(Eigen::Index(k), Eigen::Index(x)), 1e-10);
        }
    }
}

TEST(Beliefs, PerfectDagsAreUnbiasedOnAverage) {
    random::Rng rng(44);
    for (int trial = 0; trial < 30; ++trial) {
        StateSpace s(binary_variables(1 + trial % 3));
        const auto g = random::random_perfect_dag(rng, s.num_variables());
        const auto mu = random::random_mu(rng, s.size());
        const auto beta = dag_to_beta(g, s, mu);
        EXPECT_LE(beta.invariance_error(mu), 1e-10);
    }
}

TEST(Beliefs, RejectsUnsupportedDags) {
    StateSpace s(binary_variables(2));
    const auto mu = uniform(4);
    EXPECT_THROW(dag_to_beta(scenarios::extended_short_chain(0), s, mu), UnsupportedDag);
    CausalDag v;
    auto a = v.add_state(0, "a"), b = v.add_state(1, "b");
    auto phi = v.add_price();
    v.add_addon();
    v.add_edge(a, phi);
    v.add_edge(b, phi);
    EXPECT_THROW(dag_to_beta(v, s, mu), UnsupportedDag);
}

TEST(Transition, Validation) {
    Eigen::MatrixXd m(2, 2);
    m << 0.5, 0.5, 0.2, 0.7;
    EXPECT_THROW(TransitionMatrix{m}, DomainError);
    m << 0.5, 0.5, -0.1, 1.1;
    EXPECT_THROW(TransitionMatrix{m}, DomainError);
    m << 1, 0, 0, 1;
    EXPECT_TRUE(TransitionMatrix(m).is_identity());
}

TEST(SignalBelief, ConstantInSignalWhenBlocked) {
    const auto g = scenarios::extended_short_chain(1);
    ASSERT_TRUE(blocks(g, g.parents(g.price_node()), *g.signal_node(), g.addon_node()));
    StateSpace s(binary_variables(2));
    random::Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mu = random::random_mu(rng, 4);
        Eigen::MatrixXd law = Eigen::MatrixXd::Random(4, 3).array().abs() + 0.05;
        Eigen::MatrixXd sig = Eigen::MatrixXd::Random(4, 3).array().abs() + 0.05;
        for (Eigen::Index r = 0; r < 4; ++r) {
            law.row(r) /= law.row(r).sum();
            sig.row(r) /= sig.row(r).sum();
        }
        const auto b = belief_with_signal(g, fully_revealing_joint(g, s, mu, law, &sig));
        for (std::size_t phi = 0; phi < b.num_prices(); ++phi)
            for (std::size_t w = 1; w < b.num_signals(); ++w)
                for (std::size_t x = 0; x < b.num_addons(); ++x) {
                    if (!b.defined(phi, w) || !b.defined(phi, 0)) continue;
                    EXPECT_NEAR(b(phi, w, x), b(phi, 0, x), 1e-10);
                }
    }
}

TEST(SignalBelief, VariesWithSignalWhenNotBlocked) {
    const auto g = scenarios::extended_short_chain(0);
    StateSpace s(binary_variables(2));
    random::Rng rng(78);
    const auto mu = random::random_mu(rng, 4);
    Eigen::MatrixXd law(4, 2), sig(4, 2);
    law << 1, 0, 0, 1, 1, 0, 0, 1;
    sig << 0.9, 0.1, 0.2, 0.8, 0.6, 0.4, 0.3, 0.7;
    const auto b = belief_with_signal(g, fully_revealing_joint(g, s, mu, law, &sig));
    double spread = 0.0;
    for (std::size_t phi = 0; phi < b.num_prices(); ++phi)
        if (b.defined(phi, 0) && b.defined(phi, 1)) spread = std::max(spread, std::abs(b(phi, 0, 0) - b(phi, 1, 0)));
    EXPECT_GT(spread, 1e-3);
}
