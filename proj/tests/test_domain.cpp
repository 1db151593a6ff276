#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rtsched/domain.hpp"

namespace rtsched {
namespace {

using W = Weekday;

PatientCase patient(int sessions, SessionPattern pattern) {
  PatientCase p;
  p.id = "P1";
  p.durations.assign(static_cast<std::size_t>(sessions), 12);
  p.pattern = pattern;
  p.weekend_ok = pattern.days_per_week == 7;
  return p;
}

std::vector<int> offsets(const SessionExpansion& e) {
  std::vector<int> out;
  for (const SessionSlot& s : e) out.push_back(s.offset);
  return out;
}

TEST(Weights, FixedPerStatus) {
  EXPECT_EQ(patient_weight(WaitingListStatus::Emergency), 10);
  EXPECT_EQ(patient_weight(WaitingListStatus::Urgent), 3);
  EXPECT_EQ(patient_weight(WaitingListStatus::Routine), 1);
  EXPECT_GT(priority(WaitingListStatus::Emergency), priority(WaitingListStatus::Urgent));
  EXPECT_GT(priority(WaitingListStatus::Urgent), priority(WaitingListStatus::Routine));
}

TEST(Jcco, TableValues) {
  EXPECT_EQ(jcco_targets(WaitingListStatus::Emergency, TreatmentIntent::Radical),
            (JccoTargets{1, 2}));
  EXPECT_EQ(jcco_targets(WaitingListStatus::Urgent, TreatmentIntent::Palliative),
            (JccoTargets{2, 14}));
  EXPECT_EQ(jcco_targets(WaitingListStatus::Routine, TreatmentIntent::Radical),
            (JccoTargets{14, 28}));
  for (auto s : {WaitingListStatus::Routine, WaitingListStatus::Urgent,
                 WaitingListStatus::Emergency}) {
    for (auto i : {TreatmentIntent::Radical, TreatmentIntent::Palliative}) {
      const JccoTargets t = jcco_targets(s, i);
      EXPECT_LE(t.good_practice_days, t.max_acceptable_days);
    }
  }
}

TEST(SessionGap, PatternTables) {
  const auto mwf = SessionPattern::weekly(3);
  EXPECT_EQ(session_gap(mwf, W::Mon, 1), 2);
  EXPECT_EQ(session_gap(mwf, W::Wed, 1), 2);
  EXPECT_EQ(session_gap(mwf, W::Fri, 1), 3);
  EXPECT_THROW(session_gap(mwf, W::Tue, 1), InvalidWeekdayForPattern);

  const auto daily = SessionPattern::weekly(5);
  for (W w : {W::Mon, W::Tue, W::Wed, W::Thu}) EXPECT_EQ(session_gap(daily, w, 1), 1);
  EXPECT_EQ(session_gap(daily, W::Fri, 1), 3);
  EXPECT_THROW(session_gap(daily, W::Sat, 1), InvalidWeekdayForPattern);

  for (W w : kAllWeekdays) {
    EXPECT_EQ(session_gap(SessionPattern::weekly(1), w, 1), 7);
    EXPECT_EQ(session_gap(SessionPattern::weekly(7), w, 1), 1);
  }

  const auto mon_thu = SessionPattern::weekly(2, TwoDayAnchor::MonThu);
  EXPECT_EQ(session_gap(mon_thu, W::Mon, 1), 3);
  EXPECT_EQ(session_gap(mon_thu, W::Thu, 1), 4);
  EXPECT_THROW(session_gap(mon_thu, W::Tue, 1), InvalidWeekdayForPattern);
  const auto tue_fri = SessionPattern::weekly(2, TwoDayAnchor::TueFri);
  EXPECT_EQ(session_gap(tue_fri, W::Tue, 1), 3);
  EXPECT_EQ(session_gap(tue_fri, W::Fri, 1), 4);
}

TEST(SessionGap, ChartSameDayFractions) {
  const auto chart = SessionPattern::chart_pattern();
  EXPECT_EQ(session_gap(chart, W::Mon, 1), 0);
  EXPECT_EQ(session_gap(chart, W::Mon, 2), 0);
  EXPECT_EQ(session_gap(chart, W::Mon, 3), 1);
}

TEST(Expansion, Examples) {
  EXPECT_EQ(offsets(session_expansion(patient(5, SessionPattern::weekly(5)), W::Mon)),
            (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(offsets(session_expansion(patient(5, SessionPattern::weekly(3)), W::Mon)),
            (std::vector<int>{0, 2, 4, 7, 9}));

  std::vector<int> chart;
  for (int d = 0; d < 12; ++d) chart.insert(chart.end(), {d, d, d});
  EXPECT_EQ(offsets(session_expansion(patient(36, SessionPattern::chart_pattern()), W::Mon)),
            chart);
}

TEST(Expansion, CarriesDurations) {
  PatientCase p = patient(3, SessionPattern::weekly(5));
  p.durations = {15, 12, 9};
  const auto e = session_expansion(p, W::Thu);
  EXPECT_EQ(e, (SessionExpansion{{0, 15}, {1, 12}, {4, 9}}));
}

TEST(Expansion, PatternProperties) {
  for (int dpw : {1, 2, 3, 5, 7}) {
    for (auto anchor : {TwoDayAnchor::MonThu, TwoDayAnchor::TueFri}) {
      const auto pattern =
          SessionPattern::weekly(dpw, dpw == 2 ? anchor : TwoDayAnchor::None);
      const PatientCase p = patient(20, pattern);
      for (W start : allowed_start_days(p).members()) {
        const auto e = session_expansion(p, start);
        ASSERT_EQ(e.size(), 20u);
        for (std::size_t l = 1; l < e.size(); ++l) {
          const int step = e[l].offset - e[l - 1].offset;
          EXPECT_GT(step, 0);
          const W w = advance(start, e[l].offset);
          if (dpw == 5) EXPECT_FALSE(is_weekend(w));
          if (dpw == 7) EXPECT_EQ(step, 1);
          if (dpw == 1) {
            EXPECT_EQ(step, 7);
            EXPECT_EQ(w, start);
          }
          if (dpw == 3) EXPECT_TRUE((WeekdaySet{W::Mon, W::Wed, W::Fri}.contains(w)));
        }
      }
    }
  }
}

TEST(StartDays, Examples) {
  PatientCase palliative = patient(10, SessionPattern::weekly(5));
  palliative.intent = TreatmentIntent::Palliative;
  palliative.min_sessions_before_weekend = 2;
  EXPECT_EQ(allowed_start_days(palliative), (WeekdaySet{W::Mon, W::Tue, W::Wed, W::Thu}));

  EXPECT_EQ(allowed_start_days(patient(36, SessionPattern::chart_pattern())), WeekdaySet{W::Mon});

  PatientCase doctor = patient(10, SessionPattern::weekly(5));
  doctor.doctor_days = WeekdaySet{W::Tue, W::Thu};
  EXPECT_EQ(allowed_start_days(doctor), (WeekdaySet{W::Tue, W::Thu}));

  EXPECT_EQ(allowed_start_days(patient(4, SessionPattern::weekly(3))),
            (WeekdaySet{W::Mon, W::Wed, W::Fri}));
  EXPECT_EQ(allowed_start_days(patient(4, SessionPattern::weekly(2, TwoDayAnchor::MonThu))),
            (WeekdaySet{W::Mon, W::Thu}));
}

TEST(StartDays, SameWeekRun) {
  PatientCase p = patient(4, SessionPattern::weekly(5));
  p.min_sessions_before_weekend = 4;
  EXPECT_EQ(allowed_start_days(p), (WeekdaySet{W::Mon, W::Tue}));
}

TEST(StartDays, WeekendOnlyWhenAllowed) {
  PatientCase single = patient(1, SessionPattern::weekly(5));
  EXPECT_EQ(allowed_start_days(single), WeekdaySet::weekdays());
  single.weekend_ok = true;
  EXPECT_EQ(allowed_start_days(single), WeekdaySet::all());
}

TEST(StartDays, EmptyIntersectionIsAnError) {
  PatientCase p = patient(6, SessionPattern::weekly(3));
  p.doctor_days = WeekdaySet{W::Tue};
  EXPECT_THROW(allowed_start_days(p), EmptyStartDaySet);
}

TEST(StartDays, DoctorConstraintOnlyShrinks) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 2000; ++t) {
    PatientCase p = testing::random_patient(rng, "P", 1, 10, 6,
                                            RadiationNeed::HighEnergyPhotonGroup);
    const WeekdaySet with = allowed_start_days(p);
    EXPECT_TRUE(with.subset_of(pattern_start_days(p)));
    p.doctor_days.reset();
    EXPECT_TRUE(with.subset_of(allowed_start_days(p)));
  }
}

TEST(Validation, RejectsBrokenPatients) {
  PatientCase p = patient(3, SessionPattern::weekly(5));
  EXPECT_NO_THROW(validate(p));
  p.release = -1;
  EXPECT_THROW(validate(p), InvalidPatient);
  p = patient(3, SessionPattern::weekly(5));
  p.jcco_good = 5;
  p.jcco_max = 4;
  EXPECT_THROW(validate(p), InvalidPatient);
  p = patient(3, SessionPattern::weekly(5));
  p.durations[1] = 0;
  EXPECT_THROW(validate(p), InvalidPatient);
  p = patient(3, SessionPattern::weekly(2));
  EXPECT_THROW(validate(p), InvalidPatient);
  p = patient(30, SessionPattern::chart_pattern());
  EXPECT_THROW(validate(p), InvalidPatient);
  p = patient(3, SessionPattern::weekly(5));
  p.doctor_days = WeekdaySet{};
  EXPECT_THROW(validate(p), InvalidPatient);
}

TEST(WeekdaySet, TextRoundTrip) {
  const WeekdaySet s{W::Mon, W::Thu};
  EXPECT_EQ(s.to_string(), "Mon,Thu");
  EXPECT_EQ(WeekdaySet::parse("Mon,Thu"), s);
  EXPECT_EQ(WeekdaySet{}.to_string(), "-");
  EXPECT_THROW(WeekdaySet::parse("Mon,Xyz"), DataError);
}

TEST(Calendar, WeekdaysAdvance) {
  const Calendar c{W::Fri};
  EXPECT_EQ(c.weekday(1), W::Fri);
  EXPECT_EQ(c.weekday(2), W::Sat);
  EXPECT_EQ(c.weekday(4), W::Mon);
  EXPECT_EQ(c.weekday(8), W::Fri);
}

}  // namespace
}  // namespace rtsched
