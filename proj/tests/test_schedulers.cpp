#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "gridsched/sched/scheduler.hpp"

using namespace gridsched;

namespace {

Outcome make_outcome(int task, double reward, bool solved, double verr, int round) {
  Outcome o;
  o.task = task;
  o.episode_reward = reward;
  o.solved = solved;
  o.value_error = verr;
  o.round = round;
  return o;
}

// Brute-force PLR distribution, written independently of the production code:
// ranks from pairwise comparisons instead of a sort, explicit normalizations.
SampleDistribution plr_oracle(const std::vector<double>& scores,
                              const std::vector<int>& last_rounds, int current_round, double beta,
                              double rho) {
  const std::size_t n = scores.size();
  std::vector<double> hw(n), sw(n);
  double hsum = 0.0, ssum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rank = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (scores[j] > scores[i]) ++rank;
      else if (scores[j] == scores[i] && j < i) ++rank;
    }
    hw[i] = std::pow(1.0 / static_cast<double>(rank), 1.0 / beta);
    hsum += hw[i];
    sw[i] = static_cast<double>(current_round - last_rounds[i]);
    ssum += sw[i];
  }
  SampleDistribution out;
  out.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ps = hw[i] / hsum;
    const double pt = ssum > 0.0 ? sw[i] / ssum : 1.0 / static_cast<double>(n);
    out.p[i] = (1.0 - rho) * ps + rho * pt;
  }
  return out;
}

void require_valid(const SampleDistribution& d) {
  REQUIRE(std::abs(d.sum() - 1.0) <= 1e-9);
  for (double x : d.p) REQUIRE(x >= 0.0);
}

}  // namespace

TEST_CASE("leitner transition table and distribution") {
  SECTION("all ten box-outcome transitions") {
    for (int box = 1; box <= 5; ++box) {
      for (bool solved : {true, false}) {
        LeitnerState st(3);
        st.box[1] = box;
        leitner_update(st, make_outcome(1, solved ? 1.0 : 0.0, solved, 0.1, 0));
        const int expected = solved ? std::min(box + 1, 5) : 1;
        REQUIRE(st.box[1] == expected);
        REQUIRE(st.box[0] == 1);  // untouched
        REQUIRE(st.box[2] == 1);
      }
    }
  }

  SECTION("unknown task rejected") {
    LeitnerState st(3);
    REQUIRE_THROWS_AS(leitner_update(st, make_outcome(3, 1.0, true, 0.0, 0)), std::out_of_range);
    REQUIRE_THROWS_AS(leitner_update(st, make_outcome(-1, 1.0, true, 0.0, 0)), std::out_of_range);
  }

  SECTION("distribution weights 2^(1-box)") {
    LeitnerState uniform1(4);
    const SampleDistribution d1 = leitner_distribution(uniform1);
    for (double x : d1.p) REQUIRE(x == Catch::Approx(0.25).margin(1e-12));

    LeitnerState st(2);
    st.box = {1, 2};
    const SampleDistribution d2 = leitner_distribution(st);
    REQUIRE(d2.p[0] == Catch::Approx(2.0 / 3.0).margin(1e-12));
    REQUIRE(d2.p[1] == Catch::Approx(1.0 / 3.0).margin(1e-12));

    LeitnerState top(4);
    top.box = {5, 5, 5, 5};
    const SampleDistribution d3 = leitner_distribution(top);
    for (double x : d3.p) REQUIRE(x == Catch::Approx(0.25).margin(1e-12));
  }

  SECTION("reachability: four wins reach box 5, one loss resets") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      LeitnerState st(6);
      for (int i = 0; i < 6; ++i) st.box[i] = 1 + rng.next_int(5);
      for (int k = 0; k < 4; ++k) leitner_update(st, make_outcome(2, 1.0, true, 0.0, k));
      REQUIRE(st.box[2] == 5);
      leitner_update(st, make_outcome(2, 0.0, false, 0.0, 4));
      REQUIRE(st.box[2] == 1);
    }
  }
}

TEST_CASE("sm2 quality, easiness and intervals") {
  SECTION("quality mapping rounds half away from zero") {
    REQUIRE(sm2_quality(1.0) == 5);
    REQUIRE(sm2_quality(0.0) == 0);
    REQUIRE(sm2_quality(0.55) == 3);  // round(2.75)
    REQUIRE(sm2_quality(0.5) == 3);   // round(2.5) away from zero
    REQUIRE(sm2_quality(0.1) == 1);   // round(0.5) away from zero
    REQUIRE_THROWS_AS(sm2_quality(-0.01), std::invalid_argument);
    REQUIRE_THROWS_AS(sm2_quality(1.01), std::invalid_argument);
  }

  SECTION("worked easiness-factor updates") {
    Sm2State st(1);
    st.items[0].ef = 2.5;
    sm2_update(st, make_outcome(0, 1.0, true, 0.0, 0), 0);  // q = 5
    REQUIRE(st.items[0].ef == Catch::Approx(2.6).margin(1e-12));

    st.items[0].ef = 2.5;
    sm2_update(st, make_outcome(0, 0.8, true, 0.0, 1), 1);  // q = 4
    REQUIRE(st.items[0].ef == Catch::Approx(2.5).margin(1e-12));

    st.items[0].ef = 1.35;
    sm2_update(st, make_outcome(0, 0.0, false, 0.0, 2), 2);  // q = 0, raw delta -0.8
    REQUIRE(st.items[0].ef == Catch::Approx(1.3).margin(1e-12));
  }

  SECTION("interval schedule: 1, 6, then geometric in prior easiness") {
    Sm2State st(1);
    sm2_update(st, make_outcome(0, 1.0, true, 0.0, 0), 0);  // rep 1
    REQUIRE(st.items[0].repetition == 1);
    REQUIRE(st.items[0].interval == 1);
    REQUIRE(st.items[0].due_round == 1);
    sm2_update(st, make_outcome(0, 1.0, true, 0.0, 1), 1);  // rep 2
    REQUIRE(st.items[0].interval == 6);
    REQUIRE(st.items[0].due_round == 7);
    // before the third update EF = 2.7; interval = round(6 * 2.7) = 16
    REQUIRE(st.items[0].ef == Catch::Approx(2.7).margin(1e-12));
    sm2_update(st, make_outcome(0, 1.0, true, 0.0, 7), 7);  // rep 3
    REQUIRE(st.items[0].interval == 16);
    REQUIRE(st.items[0].due_round == 23);

    sm2_update(st, make_outcome(0, 0.2, false, 0.0, 23), 23);  // q = 1 resets
    REQUIRE(st.items[0].repetition == 0);
    REQUIRE(st.items[0].interval == 1);
    REQUIRE(st.items[0].due_round == 24);
  }

  SECTION("easiness never drops below 1.3 and is monotone in quality") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      const double ef0 = 1.3 + 1.5 * rng.next_double();
      double prev_ef = -1.0;
      for (int q = 0; q <= 5; ++q) {
        Sm2State st(1);
        st.items[0].ef = ef0;
        sm2_update(st, make_outcome(0, q / 5.0, q >= 3, 0.0, 0), 0);
        REQUIRE(st.items[0].ef >= 1.3);
        if (q > 0) REQUIRE(st.items[0].ef >= prev_ef - 1e-12);
        prev_ef = st.items[0].ef;
      }
    }
  }

  SECTION("distribution favors overdue tasks") {
    Sm2State uniform2(3);
    const SampleDistribution d1 = sm2_distribution(uniform2, 0);  // all due at round 0
    for (double x : d1.p) REQUIRE(x == Catch::Approx(1.0 / 3.0).margin(1e-12));

    Sm2State st(2);
    st.items[0].due_round = 2;  // overdue by 3 at round 5
    st.items[1].due_round = 9;  // not due
    const SampleDistribution d2 = sm2_distribution(st, 5);
    REQUIRE(d2.p[0] == Catch::Approx(4.0 / 4.05).margin(1e-12));
    REQUIRE(d2.p[1] == Catch::Approx(0.05 / 4.05).margin(1e-12));

    Sm2State none(4);
    for (auto& it : none.items) it.due_round = 100;
    const SampleDistribution d3 = sm2_distribution(none, 5);
    for (double x : d3.p) REQUIRE(x == Catch::Approx(0.25).margin(1e-12));
  }
}

TEST_CASE("plr scoring, exploration and staleness") {
  SECTION("update replaces the score and records the round") {
    PlrState st(3);
    plr_update(st, make_outcome(1, 0.5, false, 0.7, 4));
    REQUIRE(st.score[1] == 0.7);
    REQUIRE(st.seen[1]);
    REQUIRE(st.last_round[1] == 4);
    plr_update(st, make_outcome(1, 0.5, false, 0.2, 9));
    REQUIRE(st.score[1] == 0.2);  // replacement, not averaging
    REQUIRE(st.last_round[1] == 9);
    REQUIRE(!st.seen[0]);
    REQUIRE(!st.seen[2]);
  }

  SECTION("forced exploration over unseen tasks") {
    PlrState st(15);
    for (int i = 0; i < 14; ++i) plr_update(st, make_outcome(i, 0.5, true, 0.3, i));
    const SampleDistribution d = plr_distribution(st, 20);
    REQUIRE(d.p[14] == 1.0);
    for (int i = 0; i < 14; ++i) REQUIRE(d.p[i] == 0.0);

    PlrState st2(4);
    plr_update(st2, make_outcome(0, 0.5, true, 0.3, 0));
    plr_update(st2, make_outcome(2, 0.5, true, 0.3, 1));
    const SampleDistribution d2 = plr_distribution(st2, 5);
    REQUIRE(d2.p[1] == 0.5);
    REQUIRE(d2.p[3] == 0.5);
    REQUIRE(d2.p[0] == 0.0);
  }

  SECTION("worked rank example: beta = 1, rho = 0") {
    PlrState st(3, PlrConfig{1.0, 0.0});
    plr_update(st, make_outcome(0, 0.0, false, 0.5, 0));
    plr_update(st, make_outcome(1, 0.0, false, 0.2, 1));
    plr_update(st, make_outcome(2, 0.0, false, 0.1, 2));
    const SampleDistribution d = plr_distribution(st, 3);
    REQUIRE(d.p[0] == Catch::Approx(6.0 / 11.0).margin(1e-12));
    REQUIRE(d.p[1] == Catch::Approx(3.0 / 11.0).margin(1e-12));
    REQUIRE(d.p[2] == Catch::Approx(2.0 / 11.0).margin(1e-12));
  }

  SECTION("worked staleness example: rho = 1") {
    PlrState st(3, PlrConfig{0.1, 1.0});
    plr_update(st, make_outcome(0, 0.0, false, 0.4, 1));
    plr_update(st, make_outcome(1, 0.0, false, 0.4, 2));
    plr_update(st, make_outcome(2, 0.0, false, 0.4, 2));
    const SampleDistribution d = plr_distribution(st, 3);  // staleness {2, 1, 1}
    REQUIRE(d.p[0] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(d.p[1] == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(d.p[2] == Catch::Approx(0.25).margin(1e-12));
  }

  SECTION("all staleness zero falls back to uniform staleness term") {
    PlrState st(2, PlrConfig{0.1, 1.0});
    plr_update(st, make_outcome(0, 0.0, false, 0.9, 5));
    plr_update(st, make_outcome(1, 0.0, false, 0.1, 5));
    const SampleDistribution d = plr_distribution(st, 5);
    REQUIRE(d.p[0] == 0.5);
    REQUIRE(d.p[1] == 0.5);
  }

  SECTION("matches brute-force oracle exactly on random states") {
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 2 + rng.next_int(9);  // n in [2, 10]
      const double beta = 0.1 + rng.next_double() * 2.0;
      const double rho = rng.next_double();
      PlrState st(n, PlrConfig{beta, rho});
      int round = 0;
      for (int i = 0; i < n; ++i) {
        // duplicate scores with 30% chance to exercise tie-breaking
        const double s = rng.next_double() < 0.3 ? 0.25 : rng.next_double();
        plr_update(st, make_outcome(i, 0.0, false, s, round));
        round += rng.next_int(3);
      }
      const int now = round + rng.next_int(5);
      const SampleDistribution got = plr_distribution(st, now);
      const SampleDistribution want =
          plr_oracle(st.score, st.last_round, now, beta, rho);
      for (int i = 0; i < n; ++i) REQUIRE(got.p[i] == want.p[i]);
      require_valid(got);
    }
  }

  SECTION("positive scaling of scores leaves the distribution unchanged") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 3 + rng.next_int(8);
      PlrState a(n), b(n);
      const double scale = 0.01 + rng.next_double() * 50.0;
      for (int i = 0; i < n; ++i) {
        const double s = rng.next_double();
        plr_update(a, make_outcome(i, 0.0, false, s, i));
        plr_update(b, make_outcome(i, 0.0, false, s * scale, i));
      }
      const SampleDistribution da = plr_distribution(a, n + 3);
      const SampleDistribution db = plr_distribution(b, n + 3);
      for (int i = 0; i < n; ++i) REQUIRE(da.p[i] == Catch::Approx(db.p[i]).margin(1e-12));
    }
  }
}

TEST_CASE("random distribution and task selection") {
  SECTION("uniform for any count") {
    const SampleDistribution d15 = random_distribution(15);
    for (double x : d15.p) REQUIRE(x == Catch::Approx(1.0 / 15.0).margin(1e-12));
    const SampleDistribution d1 = random_distribution(1);
    REQUIRE(d1.p[0] == 1.0);
    for (int n : {2, 7, 100, 10000}) {
      REQUIRE(std::abs(random_distribution(n).sum() - 1.0) <= 1e-9);
    }
    REQUIRE_THROWS_AS(random_distribution(0), std::invalid_argument);
  }

  SECTION("select_task follows the distribution") {
    SampleDistribution degenerate{{0.0, 0.0, 1.0, 0.0}};
    Rng rng(1);
    for (int i = 0; i < 50; ++i) REQUIRE(select_task(degenerate, rng) == 2);

    SampleDistribution biased{{0.75, 0.25}};
    Rng r2(99);
    int c0 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      if (select_task(biased, r2) == 0) ++c0;
    }
    REQUIRE(std::abs(c0 / static_cast<double>(n) - 0.75) < 0.01);

    Rng a(5), b(5);
    for (int i = 0; i < 200; ++i) REQUIRE(select_task(biased, a) == select_task(biased, b));
  }

  SECTION("invalid distributions are rejected") {
    Rng rng(2);
    SampleDistribution short_sum{{0.5, 0.4}};
    REQUIRE_THROWS_AS(select_task(short_sum, rng), std::invalid_argument);
    SampleDistribution neg{{1.2, -0.2}};
    REQUIRE_THROWS_AS(select_task(neg, rng), std::invalid_argument);
  }
}

TEST_CASE("scheduler facade keeps invariants over random trajectories") {
  Rng rng(31);
  for (Method m : {Method::Leitner, Method::Supermemo, Method::Plr, Method::Random}) {
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 2 + rng.next_int(14);
      Scheduler sched(m, n);
      for (int round = 0; round < 100; ++round) {
        const SampleDistribution d = sched.distribution(round);
        require_valid(d);
        const int task = select_task(d, rng);
        REQUIRE(task >= 0);
        REQUIRE(task < n);
        const double reward = rng.next_double();
        sched.report(make_outcome(task, reward, reward > 0.5, rng.next_double(), round));
      }
    }
  }
}
