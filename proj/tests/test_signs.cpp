#include <gtest/gtest.h>

#include <cmath>

#include "maxstab/signs.hpp"

using namespace maxstab;

TEST(SignField, LookupAndNone) {
    const std::vector<double> v{0, 2, 1, 3, 0};
    Engine rng = make_engine(1, {kTagSigns, 0});
    const SignField f = attach_signs(v, 1, rng);
    EXPECT_EQ(f.indices(), (std::vector<std::size_t>{1, 3}));
    EXPECT_NE(f.sign_at(1), 0);
    EXPECT_EQ(f.sign_at(2), 0);
}

TEST(ConditionalCopy, WindowCopiesEverySign) {
    // E = window: WE = W, so every maximum inherits its sign
    const CensorSet e = make_elementary({{0.0, 1.0}});
    const TimeGrid g(0.0, 1.0, 9);
    Engine rng = make_engine(2, {kTagCoupled, 9, 0});
    const CoupledSample s = draw_coupled(e, g, rng);
    const SignField f = attach_signs(s.W, 2, rng);
    const ConditionalCopy c = conditional_copy(s, e, f, MatchConfig{}, rng);
    EXPECT_EQ(c.matched, f.entries.size());
    for (const auto& x : c.field.entries) {
        EXPECT_EQ(x.provenance, Provenance::Original);
        EXPECT_EQ(x.sign, f.sign_at(x.index));
    }
}

TEST(ConditionalCopy, EmptySetResamplesAll) {
    const CensorSet e = make_elementary({});
    const TimeGrid g(0.0, 1.0, 9);
    Engine rng = make_engine(3, {kTagCoupled, 9, 0});
    const CoupledSample s = draw_coupled(e, g, rng);
    const SignField f = attach_signs(s.W, 2, rng);
    const ConditionalCopy c = conditional_copy(s, e, f, MatchConfig{}, rng);
    EXPECT_EQ(c.matched, 0u);
    for (const auto& x : c.field.entries) EXPECT_EQ(x.provenance, Provenance::Resampled);
}

TEST(Functional, PieceEvaluation) {
    const std::vector<double> incr{0.5, -0.25, 1.0, 2.0};
    Piece p;
    p.g = GKind::ClipExp;
    p.a = 1.0;
    p.b = 2.0;
    EXPECT_DOUBLE_EQ(evaluate_piece(p, incr, 0, 2), std::exp(0.25));
    EXPECT_DOUBLE_EQ(evaluate_piece(p, incr, 2, 4), 2.0);
    p.g = GKind::Indicator;
    p.a = 0.0;
    EXPECT_DOUBLE_EQ(evaluate_piece(p, incr, 0, 2), 1.0);
    p.g = GKind::Const;
    p.a = 0.75;
    EXPECT_DOUBLE_EQ(evaluate_piece(p, incr, 0, 4), 0.75);
}

TEST(Functional, LocalityViolationIsCaught) {
    const TimeGrid g(0.0, 1.0, 6);
    ProductFunctional f;
    Piece leaky;
    leaky.span = {0.0, 0.5};
    leaky.select = {0.0, 0.5};
    leaky.g = GKind::Custom;
    leaky.custom = [](const std::vector<double>& incr, std::size_t, std::size_t) { return incr.back(); };
    f.pieces.push_back(leaky);
    EXPECT_THROW(check_locality(f, g, 1), std::invalid_argument);
    f.pieces[0].g = GKind::ClipExp;
    EXPECT_NO_THROW(check_locality(f, g, 1));
}

TEST(Functional, RejectsOverlapsAndTinySelections) {
    const TimeGrid g(0.0, 1.0, 6);
    ProductFunctional f;
    f.pieces.push_back({{0.0, 0.6}, GKind::Const, 1.0, 1.0, {}, {0.0, 0.6}});
    f.pieces.push_back({{0.5, 1.0}, GKind::Const, 1.0, 1.0, {}, {0.5, 1.0}});
    EXPECT_THROW(check_locality(f, g, 1), std::invalid_argument);
    ProductFunctional tiny;
    tiny.pieces.push_back({{0.0, 1.0}, GKind::Const, 1.0, 1.0, {}, {0.5, 0.5}});
    EXPECT_THROW(check_locality(tiny, g, 1), std::invalid_argument);
}

TEST(Formula, CompatibleOnAFatCantorSet) {
    const CensorSet e = make_cantor(alpha_schedule(3.0, 14));
    ProductFunctional f;
    f.pieces.push_back({{0.0, 0.5}, GKind::ClipExp, 1.0, 3.0, {}, {0.0, 0.5}});
    f.pieces.push_back({{0.5, 1.0}, GKind::Indicator, 0.0, 1.0, {}, {0.5, 1.0}});
    const FormulaCheck c = verify_probability_formula(e, f, TimeGrid(0.0, 1.0, 9), MatchConfig{}, 4000, 3);
    EXPECT_TRUE(c.compatible) << "lhs " << c.lhs.mean() << " rhs " << c.rhs.mean() << " z " << c.z;
    EXPECT_GE(c.lhs.mean(), -3 * c.lhs.stderr_());
    EXPECT_EQ(c.rhs_pieces.size(), 2u);
}

TEST(Formula, FreshSignBatchLeavesEstimatesUnchanged) {
    const CensorSet e = make_elementary({{0.2, 0.7}});
    ProductFunctional f;
    f.pieces.push_back({{0.0, 1.0}, GKind::Const, 1.0, 1.0, {}, {0.0, 1.0}});
    const auto a = verify_probability_formula(e, f, TimeGrid(0.0, 1.0, 8), MatchConfig{}, 3000, 10);
    const auto b = verify_probability_formula(e, f, TimeGrid(0.0, 1.0, 8), MatchConfig{}, 3000, 11);
    EXPECT_NEAR(a.lhs.mean(), b.lhs.mean(), 4 * std::hypot(a.lhs.stderr_(), b.lhs.stderr_()));
    EXPECT_NEAR(a.rhs.mean(), b.rhs.mean(), 4 * std::hypot(a.rhs.stderr_(), b.rhs.stderr_()));
}

TEST(Formula, NeedsEnoughReplicas) {
    ProductFunctional f;
    f.pieces.push_back({{0.0, 1.0}, GKind::Const, 1.0, 1.0, {}, {0.0, 1.0}});
    EXPECT_THROW(verify_probability_formula(make_elementary({{0.0, 1.0}}), f, TimeGrid(0.0, 1.0, 6), MatchConfig{},
                                            100, 1),
                 std::invalid_argument);
}
