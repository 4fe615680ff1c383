#include "doctest.h"
#include "gqm/errors.hpp"
#include "gqm/state_io.hpp"
#include "test_support.hpp"

#include <sstream>

using namespace gqm;
using gqm::testing::max_abs;

namespace {

Wavefunction sample_state() {
  std::mt19937_64 rng(5);
  const Grid1D grid(-3.0, 3.0, 24, Boundary::reflecting);
  return Wavefunction::gaussian_packet(grid, 0.3, 0.7, 1.1, random_group_algebra_element(2, rng));
}

}  // namespace

TEST_CASE("state JSON round trip is exact and byte-stable") {
  const Wavefunction psi = sample_state();
  const auto j = state_to_json(psi);
  const Wavefunction back = state_from_json(j);
  CHECK(back.grid() == psi.grid());
  CHECK(back.dim() == 2);
  CHECK(max_abs(back.values() - psi.values()) == 0.0);
  CHECK(state_to_json(back).dump() == j.dump());
}

TEST_CASE("malformed state documents are rejected") {
  auto j = state_to_json(sample_state());
  auto wrong_tag = j;
  wrong_tag["format"] = "other";
  CHECK_THROWS_AS(state_from_json(wrong_tag), ValidationError);
  auto short_row = j;
  short_row["values"][3].erase(0);
  CHECK_THROWS_AS(state_from_json(short_row), ValidationError);
  auto missing = j;
  missing.erase("grid");
  CHECK_THROWS_AS(state_from_json(missing), ValidationError);
  auto few_rows = j;
  few_rows["values"].erase(0);
  CHECK_THROWS_AS(state_from_json(few_rows), ValidationError);
}

TEST_CASE("path files") {
  std::istringstream ok("# header\n0 1\n0.5 2  # mid\n\n1 3\n");
  const LatticePath p = read_path(ok);
  CHECK(p.segments() == 2);
  CHECK(p.back().x == 3.0);

  std::istringstream extra("0 1 2\n1 1\n");
  CHECK_THROWS_AS(read_path(extra), ValidationError);
  std::istringstream backwards("1 0\n0 0\n");
  CHECK_THROWS_AS(read_path(backwards), ValidationError);
  std::istringstream single("0 0\n");
  CHECK_THROWS_AS(read_path(single), ValidationError);
}

TEST_CASE("convergence CSV leaves the first order blank") {
  ConvergenceReport r;
  r.levels = {{0.04, 100, 1e-2}, {0.02, 200, 5e-3}};
  r.observed_orders = {1.0};
  std::ostringstream os;
  write_convergence_csv(os, r);
  CHECK(os.str() == "epsilon,n_sites,l2_distance,order\n0.04,100,0.01,\n0.02,200,0.005,1\n");
}

TEST_CASE("boundary names") {
  CHECK(parse_boundary(boundary_name(Boundary::periodic)) == Boundary::periodic);
  CHECK(parse_boundary(boundary_name(Boundary::reflecting)) == Boundary::reflecting);
  CHECK_THROWS_AS(parse_boundary("open"), ValidationError);
}
