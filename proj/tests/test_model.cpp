#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "rtsched/full_model.hpp"
#include "rtsched/lp_export.hpp"
#include "rtsched/model.hpp"

namespace rtsched {
namespace {

using testing::SmallCase;

SmallCase single_linac(int horizon, int capacity) {
  SmallCase c;
  c.fleet = {{1, MachineType::C}};
  c.calendar = Calendar{Weekday::Mon};
  c.horizon = Horizon{1, horizon};
  c.capacity = std::make_unique<CapacityGrid>(1, c.calendar);
  c.ledger = std::make_unique<BookingLedger>(1);
  for (Day d = 1; d <= horizon; ++d) c.capacity->set(0, d, capacity);
  return c;
}

PatientCase one_session(std::string id, int minutes) {
  PatientCase p;
  p.id = std::move(id);
  p.booking = 1;
  p.release = 1;
  p.breach = 32;
  p.jcco_max = 29;
  p.jcco_good = 15;
  p.durations = {minutes};
  p.weekend_ok = true;
  return p;
}

std::set<ConstraintFamily> families(const std::vector<Violation>& v) {
  std::set<ConstraintFamily> out;
  for (const Violation& x : v) out.insert(x.family);
  return out;
}

TEST(FullModel, SmallestModel) {
  SmallCase c = single_linac(3, 100);
  c.batch = {one_session("P1", 10)};
  const FullModel m = build_full_model(c.batch, c.state(), c.horizon);
  EXPECT_EQ(m.num_variables(), 3u);
  int free = 0;
  for (VarIndex v = 0; v < m.num_variables(); ++v) free += !m.is_fixed(v);
  EXPECT_EQ(free, 3);
  EXPECT_EQ(m.assignment_row(0, 1).size(), 3u);

  std::vector<std::uint8_t> x(3, 0);
  EXPECT_EQ(families(m.violations(x)), std::set{ConstraintFamily::Assignment});
  x = {1, 1, 0};
  EXPECT_EQ(families(m.violations(x)), std::set{ConstraintFamily::Assignment});
  x = {0, 1, 0};
  EXPECT_TRUE(m.violations(x).empty());
}

TEST(FullModel, ReleaseFixesEarlierDays) {
  SmallCase c = single_linac(10, 100);
  PatientCase p = one_session("P1", 10);
  p.release = 5;
  c.batch = {p};
  const FullModel m = build_full_model(c.batch, c.state(), c.horizon);
  for (int k = 1; k <= 10; ++k) {
    const bool fixed = m.fixed_mask(m.index(0, 0, k, 1)) & kFixRelease;
    EXPECT_EQ(fixed, k <= 4) << "k=" << k;
  }
}

TEST(FullModel, CapacityRowSeparatesSameDayPatients) {
  SmallCase c = single_linac(1, 30);
  c.batch = {one_session("P1", 20), one_session("P2", 20)};
  const FullModel m = build_full_model(c.batch, c.state(), c.horizon);
  std::vector<std::uint8_t> x(m.num_variables(), 0);
  x[m.index(0, 0, 1, 1)] = 1;
  x[m.index(0, 1, 1, 1)] = 1;
  EXPECT_EQ(families(m.violations(x)), std::set{ConstraintFamily::Capacity});
  EXPECT_TRUE(testing::enumerate_full(m).empty());
}

TEST(FullModel, HorizonTooShort) {
  SmallCase c = single_linac(3, 100);
  PatientCase p = one_session("P1", 10);
  p.release = 9;
  c.batch = {p};
  EXPECT_THROW(build_full_model(c.batch, c.state(), c.horizon), HorizonTooShort);
  EXPECT_THROW(build_compact_model(c.batch, c.state(), c.horizon), HorizonTooShort);
}

TEST(FullModel, CapacityNetOfLedger) {
  SmallCase c = single_linac(2, 100);
  const SessionRecord booked{"X", 0, 2, 70};
  c.ledger->book(std::span(&booked, 1), *c.capacity);
  c.batch = {one_session("P1", 10)};
  const FullModel m = build_full_model(c.batch, c.state(), c.horizon);
  EXPECT_EQ(m.capacity_rhs(0, 1), 100);
  EXPECT_EQ(m.capacity_rhs(0, 2), 30);
}

TEST(Equivalence, CompactMatchesFullEnumeration) {
  std::mt19937_64 rng(20240101);
  testing::SmallCaseLimits limits;
  limits.max_patients = 3;
  limits.max_horizon = 12;
  std::size_t nonempty = 0;
  for (int trial = 0; trial < 60; ++trial) {
    SmallCase c = testing::random_small_case(rng, limits);
    const FullModel full = build_full_model(c.batch, c.state(), c.horizon);
    const CompactModel compact = build_compact_model(c.batch, c.state(), c.horizon);
    const auto a = testing::enumerate_full(full);
    const auto b = testing::enumerate_compact(compact, c.batch, full, c.calendar);
    ASSERT_EQ(a, b) << "trial " << trial;
    nonempty += !a.empty();
  }
  EXPECT_GT(nonempty, 30u);
}

TEST(Equivalence, CandidateObjectivesMatchFullRows) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    SmallCase c = testing::random_small_case(rng, {});
    const FullModel full = build_full_model(c.batch, c.state(), c.horizon);
    const CompactModel compact = build_compact_model(c.batch, c.state(), c.horizon);
    for (std::size_t j = 0; j < c.batch.size(); ++j) {
      for (const Candidate& cand : compact.candidates[j]) {
        EXPECT_EQ(cand.contribution, testing::reference_contribution(c.batch[j], cand.start));
        std::vector<std::uint8_t> x(full.num_variables(), 0);
        x[full.index(cand.linac, j, c.horizon.relative(cand.start), 1)] = 1;
        for (Objective o : kObjectives) EXPECT_EQ(full.evaluate(o, x), cand.contribution[o]);
      }
    }
  }
}

TEST(Equivalence, ParallelBuildIsIdentical) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    SmallCase c = testing::random_small_case(rng, {});
    const CompactModel a = build_compact_model(c.batch, c.state(), c.horizon, Execution::Serial);
    const CompactModel b = build_compact_model(c.batch, c.state(), c.horizon, Execution::Parallel);
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    EXPECT_EQ(a.residual, b.residual);
    for (std::size_t j = 0; j < a.candidates.size(); ++j) {
      ASSERT_EQ(a.candidates[j].size(), b.candidates[j].size());
      for (std::size_t k = 0; k < a.candidates[j].size(); ++k) {
        EXPECT_EQ(a.candidates[j][k].linac, b.candidates[j][k].linac);
        EXPECT_EQ(a.candidates[j][k].start, b.candidates[j][k].start);
      }
    }
  }
}

TEST(Criteria, WaitingTieExample) {
  // Waiting times 1, 3, 3 against 2, 2, 3; every target is met in both.
  auto make = [](std::string id) {
    PatientCase p = one_session(std::move(id), 10);
    p.booking = 0;
    p.release = 0;
    p.breach = 5;
    p.jcco_max = 5;
    p.jcco_good = 5;
    return p;
  };
  const std::vector<PatientCase> batch = {make("A"), make("B"), make("C")};
  Schedule first(3), second(3);
  first.assignments = {Assignment{0, 1}, Assignment{0, 3}, Assignment{0, 3}};
  second.assignments = {Assignment{0, 2}, Assignment{0, 2}, Assignment{0, 3}};
  const CriteriaVector a = evaluate_criteria(first, batch);
  const CriteriaVector b = evaluate_criteria(second, batch);
  EXPECT_EQ(a.waiting, 19);
  EXPECT_EQ(b.waiting, 17);
  EXPECT_LT(b, a);
}

TEST(Criteria, LexicographicOrder) {
  EXPECT_LT((CriteriaVector{0, 100, 100, 100}), (CriteriaVector{1, 0, 0, 0}));
  EXPECT_LT((CriteriaVector{1, 2, 3, 4}), (CriteriaVector{1, 2, 3, 5}));
  EXPECT_TRUE((CriteriaVector{1, 2, 3, 4}).dominated_by({1, 2, 3, 4}));
  EXPECT_FALSE((CriteriaVector{1, 2, 4, 4}).dominated_by({2, 2, 3, 9}));
}

TEST(Verifier, DetectsEachInjectedViolation) {
  std::mt19937_64 rng(99);
  for (int f = 1; f <= 7; ++f) {
    const auto family = static_cast<ConstraintFamily>(f);
    for (int trial = 0; trial < 10; ++trial) {
      const testing::ViolationCase v = testing::violation_case(family, rng);
      const auto state = v.system.state();
      EXPECT_EQ(families(check_placements(v.placements, v.system.batch, state, v.system.horizon)),
                std::set{family})
          << to_string(family) << " trial " << trial;
      const FullModel m = build_full_model(v.system.batch, state, v.system.horizon);
      EXPECT_EQ(families(m.violations(to_vector(m, v.placements))), std::set{family})
          << to_string(family) << " trial " << trial;
    }
  }
}

TEST(Verifier, ViolationText) {
  const Violation v{ConstraintFamily::Capacity, 0, std::nullopt, 3, std::nullopt};
  EXPECT_EQ(v.to_string(), "capacity i=1 j=- k=3 l=-");
}

// Two patients on one linac; the golden file pins the exact LP text.
SmallCase lp_case() {
  SmallCase c = single_linac(4, 30);
  PatientCase a = one_session("P1", 20);
  a.breach = 2;
  PatientCase b;
  b.id = "P2";
  b.status = WaitingListStatus::Urgent;
  b.weight = 3;
  b.booking = 1;
  b.release = 2;
  b.breach = 32;
  b.jcco_max = 3;
  b.jcco_good = 2;
  b.durations = {15, 10};
  b.pattern = SessionPattern::weekly(5);
  c.batch = {a, b};
  return c;
}

TEST(LpExport, MatchesGolden) {
  const SmallCase c = lp_case();
  const FullModel m = build_full_model(c.batch, c.state(), c.horizon);
  std::ifstream in(std::string(RTSCHED_TEST_DATA) + "/two_patients_f4.lp");
  ASSERT_TRUE(in) << "missing golden file";
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(export_lp(m, Objective::Waiting), golden.str());
}

TEST(LpExport, DeterministicAndObjectiveSpecific) {
  const SmallCase c = lp_case();
  const FullModel m1 = build_full_model(c.batch, c.state(), c.horizon);
  const FullModel m2 = build_full_model(c.batch, c.state(), c.horizon);
  EXPECT_EQ(export_lp(m1, Objective::Breach), export_lp(m2, Objective::Breach));
  EXPECT_NE(export_lp(m1, Objective::Breach), export_lp(m1, Objective::Waiting));
}

TEST(Expand, SessionsFollowPattern) {
  const SmallCase c = lp_case();
  Schedule s(2);
  s.assignments = {Assignment{0, 1}, Assignment{0, 4}};
  const auto placements = expand(s, c.batch, c.calendar);
  ASSERT_EQ(placements.size(), 3u);
  EXPECT_EQ(placements[2].day, 5);
  EXPECT_EQ(last_session_day(s, c.batch, c.calendar), 5);
}

}  // namespace
}  // namespace rtsched
