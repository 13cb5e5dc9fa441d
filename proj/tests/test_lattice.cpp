#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nvpol/errors.hpp"
#include "nvpol/lattice.hpp"

using namespace nvpol;
using Catch::Approx;

TEST_CASE("crystal to NV frame is an isometry taking [111] to the z axis") {
  const Vec3 z = crystal_to_nv_frame({1, 1, 1});
  REQUIRE(z.x == Approx(0.0).margin(1e-15));
  REQUIRE(z.y == Approx(0.0).margin(1e-15));
  REQUIRE(z.z == Approx(std::sqrt(3.0)).epsilon(1e-12));

  const Vec3 ex = crystal_to_nv_frame({1, 0, 0});
  const Vec3 ey = crystal_to_nv_frame({0, 1, 0});
  const Vec3 ez = crystal_to_nv_frame({0, 0, 1});
  REQUIRE(ex.norm() == Approx(1.0).epsilon(1e-12));
  REQUIRE(ey.norm() == Approx(1.0).epsilon(1e-12));
  REQUIRE(ez.norm() == Approx(1.0).epsilon(1e-12));
  REQUIRE(ex.dot(ey) == Approx(0.0).margin(1e-12));
  REQUIRE(ey.dot(ez) == Approx(0.0).margin(1e-12));
  // right-handed: x cross y = z
  const Vec3 c = cross(ex, ey);
  REQUIRE(c.x == Approx(ez.x).margin(1e-12));
  REQUIRE(c.y == Approx(ez.y).margin(1e-12));
  REQUIRE(c.z == Approx(ez.z).margin(1e-12));
}

TEST_CASE("site generation is deterministic in the seed") {
  LatticeConfig cfg;
  cfg.seed = 12345;
  cfg.supercell_radius_nm = 1.2;
  cfg.abundance = 0.05;

  const auto a = generate_sites(cfg);
  const auto b = generate_sites(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].x == b[i].x);
    REQUIRE(a[i].y == b[i].y);
    REQUIRE(a[i].z == b[i].z);
  }

  cfg.seed = 12346;
  const auto c = generate_sites(cfg);
  const bool differs = c.size() != a.size() ||
                       !std::equal(a.begin(), a.end(), c.begin(),
                                   [](const Vec3& u, const Vec3& v) {
                                     return u.x == v.x && u.y == v.y && u.z == v.z;
                                   });
  REQUIRE(differs);
}

TEST_CASE("all generated sites respect the radial window") {
  LatticeConfig cfg;
  cfg.seed = 7;
  cfg.supercell_radius_nm = 1.5;
  cfg.abundance = 1.0;
  cfg.exclusion_radius_nm = 0.5;

  const auto sites = generate_sites(cfg);
  REQUIRE_FALSE(sites.empty());
  for (const auto& s : sites) {
    REQUIRE(s.norm() <= cfg.supercell_radius_nm + 1e-12);
    REQUIRE(s.norm() >= cfg.exclusion_radius_nm - 1e-12);
  }
}

TEST_CASE("full occupancy matches the diamond number density") {
  LatticeConfig cfg;
  cfg.supercell_radius_nm = 1.5;
  cfg.abundance = 1.0;
  const auto sites = generate_sites(cfg);

  // 8 atoms per conventional cell of volume a0^3, two sites excluded
  const double a0 = diamond_lattice_constant_nm;
  const double expected = 8.0 * (4.0 / 3.0) * std::numbers::pi *
                          std::pow(cfg.supercell_radius_nm, 3) / std::pow(a0, 3);
  REQUIRE(static_cast<double>(sites.size()) > 0.9 * expected);
  REQUIRE(static_cast<double>(sites.size()) < 1.1 * expected);

  // closest carbon to the vacancy sits at a bond length, sqrt(3)/4 a0
  double rmin = 1e9;
  for (const auto& s : sites) rmin = std::min(rmin, s.norm());
  REQUIRE(rmin == Approx(std::sqrt(3.0) / 4.0 * a0).epsilon(1e-9));
}

TEST_CASE("occupancy statistics follow the abundance") {
  LatticeConfig cfg;
  cfg.supercell_radius_nm = 1.5;
  cfg.abundance = 1.0;
  const double n_sites = static_cast<double>(generate_sites(cfg).size());

  cfg.abundance = 0.011;
  long total = 0;
  const int n_seeds = 50;
  for (int seed = 1; seed <= n_seeds; ++seed) {
    cfg.seed = static_cast<std::uint64_t>(seed);
    total += static_cast<long>(generate_sites(cfg).size());
  }
  const double mean = n_seeds * n_sites * cfg.abundance;
  const double sigma = std::sqrt(n_seeds * n_sites * cfg.abundance * (1 - cfg.abundance));
  REQUIRE(std::abs(total - mean) < 4.0 * sigma);
}

TEST_CASE("zero abundance draws nothing and selection refuses it") {
  LatticeConfig cfg;
  cfg.abundance = 0.0;
  cfg.supercell_radius_nm = 1.0;
  const auto sites = generate_sites(cfg);
  REQUIRE(sites.empty());

  PhysicalConstants constants;
  REQUIRE_THROWS_WITH(select_environment(sites, constants, cfg),
                      Catch::Matchers::ContainsSubstring("empty environment"));
}

TEST_CASE("selection ranks by coupling strength or by distance") {
  LatticeConfig cfg;
  cfg.seed = 99;
  cfg.supercell_radius_nm = 1.5;
  cfg.abundance = 0.05;
  cfg.max_spins = 6;
  PhysicalConstants constants;

  const auto sites = generate_sites(cfg);
  REQUIRE(sites.size() > 6);  // otherwise the truncation is not exercised

  cfg.selection_rule = SelectionRule::strongest_coupling;
  const auto strong = select_environment(sites, constants, cfg);
  REQUIRE(strong.size() == 6);
  for (int k = 0; k + 1 < strong.size(); ++k)
    REQUIRE(strong.spins[k].coupling.norm() >= strong.spins[k + 1].coupling.norm());

  cfg.selection_rule = SelectionRule::nearest;
  const auto near = select_environment(sites, constants, cfg);
  REQUIRE(near.size() == 6);
  for (int k = 0; k + 1 < near.size(); ++k)
    REQUIRE(near.spins[k].position->norm() <= near.spins[k + 1].position->norm());

  // fresh selections start unpolarized
  for (const auto& s : strong.spins) REQUIRE(s.p == 0.0);
}

TEST_CASE("selection keeps everything when the cap exceeds the draw") {
  LatticeConfig cfg;
  cfg.seed = 3;
  cfg.supercell_radius_nm = 0.8;
  cfg.abundance = 0.05;
  cfg.max_spins = 1000;
  PhysicalConstants constants;
  const auto sites = generate_sites(cfg);
  if (!sites.empty()) {
    const auto env = select_environment(sites, constants, cfg);
    REQUIRE(env.size() == static_cast<int>(sites.size()));
  }
}

TEST_CASE("lattice config validation") {
  LatticeConfig cfg;
  cfg.abundance = 1.5;
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
  cfg.abundance = 0.011;
  cfg.supercell_radius_nm = 0.0;
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
  cfg.supercell_radius_nm = 2.0;
  cfg.max_spins = 0;
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
  cfg.max_spins = 8;
  cfg.exclusion_radius_nm = -0.1;
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("selection rule names round-trip") {
  REQUIRE(selection_rule_from_string("strongest_coupling") ==
          SelectionRule::strongest_coupling);
  REQUIRE(selection_rule_from_string("nearest") == SelectionRule::nearest);
  REQUIRE_THROWS_AS(selection_rule_from_string("weakest"), ValidationError);
}
