#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qreach/schedule.hpp"

using namespace qreach;

TEST_CASE("schedule invariants") {
  CHECK_THROWS_AS(ControlSchedule({0.1}, {0}, {0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(ControlSchedule({0, 0.5, 0.5}, {0, 0, 0}, {0, 0, 0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(ControlSchedule({0}, {0}, {-1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(ControlSchedule({0, 2}, {0, 0}, {0, 0}, 1), std::invalid_argument);
  const ControlSchedule s({0, 1, 2}, {1, 2, 3}, {0, 0.5, 0}, 4);
  CHECK(s.piece(0.5) == 0);
  CHECK(s.piece(1.0) == 1);
  CHECK(s.piece(3.9) == 2);
  CHECK(s.u_at(1.5) == 2);
  CHECK(s.n_at(1.5) == 0.5);
  CHECK(s.piece_end(2) == 4);
  CHECK(s.max_abs_u() == 3);
}

TEST_CASE("schedule CSV") {
  const auto p = Params(2.0, 0.5, 0.1);
  std::istringstream a("t,u,n\n0,1,0\n0.5,-1,0.2\n1,0,0\n");
  const auto s = read_schedule_csv(a, p, 0);
  CHECK(s.size() == 2);
  CHECK(s.final_time() == 1);

  std::istringstream b("t,u,n\n0,1,0\n1,0,0\n");
  ScheduleCsvOptions scaled;
  scaled.scaled = true;
  const auto sc = read_schedule_csv(b, p, 0, scaled);
  CHECK(sc.final_time() == 0.5);

  std::istringstream c("t,u,n\n0,0,0\n");
  CHECK(read_schedule_csv(c, p, 10).final_time() == 10);

  std::istringstream bad_header("time,u,n\n0,0,0\n");
  CHECK_THROWS_AS(read_schedule_csv(bad_header, p, 1), FormatError);
  std::istringstream bad_cell("t,u,n\n0,x,0\n");
  CHECK_THROWS_AS(read_schedule_csv(bad_cell, p, 1), FormatError);
  std::istringstream too_big("t,u,n\n0,1e9,0\n");
  CHECK_THROWS_AS(read_schedule_csv(too_big, p, 1), std::invalid_argument);
  std::istringstream negative_n("t,u,n\n0,0,-1\n");
  CHECK_THROWS_AS(read_schedule_csv(negative_n, p, 1), std::invalid_argument);
}

TEST_CASE("simulate keeps the drift fixed point") {
  const auto p = Params::scaled(0.1);
  const auto traj = simulate({0, 0, 1}, ControlSchedule::constant(0, 0, 10), p);
  for (const auto& r : traj.states()) CHECK((r - Vec3<double>(0, 0, 1)).norm() < 1e-14);
  CHECK(traj.end_time() == doctest::Approx(10));
}

TEST_CASE("simulate across switches") {
  const auto p = Params(1.0, 0.5, 0.0);
  const ControlSchedule two({0, 1}, {0.3, 0.3}, {0, 0}, 2);
  const auto a = simulate({0, 0, 1}, two, p);
  const auto b = simulate({0, 0, 1}, ControlSchedule::constant(0.3, 0, 2), p);
  CHECK((a.back() - b.back()).norm() < 1e-9);
  CHECK(std::abs(a.back().norm() - 1) < 1e-9);
}
