#include <gtest/gtest.h>
#include <omp.h>

#include "maxstab/coupling.hpp"
#include "maxstab/pruning.hpp"
#include "maxstab/signs.hpp"
#include "maxstab/time_change.hpp"

using namespace maxstab;

// Parallel kernels must reproduce the serial results bit for bit, whatever the
// thread count.
class Parallel : public ::testing::Test {
protected:
    void SetUp() override { omp_set_num_threads(4); }
};

namespace {

void expect_same(const Estimate& a, const Estimate& b) {
    EXPECT_EQ(a.n, b.n);
    EXPECT_EQ(a.sum, b.sum);
    EXPECT_EQ(a.sumsq, b.sumsq);
}

}  // namespace

TEST_F(Parallel, FractionCounts) {
    const CensorSet e = make_cantor(alpha_schedule(3.0, 14));
    const TimeGrid g(0.0, 1.0, 10);
    MatchConfig cfg;
    cfg.w = 4;
    const CellSplit split = split_cells(e, g, cfg.theta_mem);
    const FractionCounts ser = fraction_counts(split, cfg, 300, 17, Exec::Serial);
    const FractionCounts par = fraction_counts(split, cfg, 300, 17, Exec::Parallel);
    EXPECT_EQ(ser, par);
    EXPECT_EQ(par, fraction_counts_reference(e, g, cfg, 300, 17));
}

TEST_F(Parallel, Pruning) {
    PruningPreset pr = shipped_preset();
    pr.p_a = 8.0;
    std::vector<OccupancyProfile> pop(3);
    pop[0].points = {0.1};
    pop[1].points = {0.5, 0.52};
    pop[2].points = {0.9};
    const SurvivalStats a = run_pruning(pop, pr, 500, 9, Exec::Serial);
    const SurvivalStats b = run_pruning(pop, pr, 500, 9, Exec::Parallel);
    EXPECT_EQ(a.survive, b.survive);
    EXPECT_EQ(a.retention, b.retention);
}

TEST_F(Parallel, TimeChange) {
    const CensorSet e = make_cantor(alpha_schedule(3.0, 14));
    const TimeChange tc = build_time_change(e, TimeGrid(0.0, 1.0, 9));
    const TimeChangeRun a = run_time_change(e, tc, 200, 4, 2, 1, 5, Exec::Serial);
    const TimeChangeRun b = run_time_change(e, tc, 200, 4, 2, 1, 5, Exec::Parallel);
    ASSERT_EQ(a.second_moment.size(), b.second_moment.size());
    for (std::size_t i = 0; i < a.second_moment.size(); ++i) expect_same(a.second_moment[i], b.second_moment[i]);
    EXPECT_EQ(a.corr.forward_hit, b.corr.forward_hit);
    EXPECT_EQ(a.corr.reverse_hit, b.corr.reverse_hit);
}

TEST_F(Parallel, Formula) {
    const CensorSet e = make_elementary({{0.1, 0.6}});
    ProductFunctional f;
    f.pieces.push_back({{0.0, 0.5}, GKind::ClipExp, 1.0, 2.0, {}, {0.0, 0.5}});
    f.pieces.push_back({{0.5, 1.0}, GKind::Const, 0.5, 1.0, {}, {0.5, 1.0}});
    const TimeGrid g(0.0, 1.0, 8);
    const FormulaCheck a = verify_probability_formula(e, f, g, MatchConfig{}, 1000, 4, Exec::Serial);
    const FormulaCheck b = verify_probability_formula(e, f, g, MatchConfig{}, 1000, 4, Exec::Parallel);
    expect_same(a.lhs, b.lhs);
    expect_same(a.rhs, b.rhs);
}
