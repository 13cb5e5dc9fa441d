#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "nvpol/errors.hpp"
#include "nvpol/fixtures.hpp"
#include "nvpol/format.hpp"
#include "nvpol/hyperfine.hpp"

using namespace nvpol;
using Catch::Approx;

TEST_CASE("bundled tables pass their integrity checksums") {
  REQUIRE_NOTHROW(verify_fixture_integrity());
  for (const auto& name : fixture_names())
    REQUIRE(detail::fnv1a64(fixture_csv(name)) == fixture_checksum(name));
}

TEST_CASE("a corrupted table would be caught") {
  std::string text = fixture_csv("table1");
  text[text.find("0.505446")] = '1';
  REQUIRE(detail::fnv1a64(text) != fixture_checksum("table1"));
}

TEST_CASE("fixture environments parse to eight unpolarized spins") {
  for (const auto& name : fixture_names()) {
    const auto env = fixture_environment(name);
    REQUIRE(env.size() == 8);
    REQUIRE(env.b_z == 0.0);  // field assigned by the caller
    for (const auto& s : env.spins) {
      REQUIRE(s.p == 0.0);
      REQUIRE(s.coupling.r_nm.has_value());
      REQUIRE(s.coupling.norm() > 0.0);
    }
  }
  REQUIRE_THROWS_AS(fixture_environment("table9"), ValidationError);
  REQUIRE_THROWS_AS(fixture_csv("bogus"), ValidationError);
  REQUIRE_THROWS_AS(fixture_checksum("bogus"), ValidationError);
}

TEST_CASE("table1 rows appear in the published order") {
  const auto env = fixture_environment("table1");
  REQUIRE(env.spins[0].coupling.r_nm.value() == Approx(2.169540).margin(1e-9));
  REQUIRE(env.spins[2].coupling.r_nm.value() == Approx(1.031320).margin(1e-9));
  REQUIRE(env.spins[2].coupling.azx == Approx(0.505446).margin(1e-9));
  REQUIRE(env.spins[7].coupling.azz == Approx(0.027203).margin(1e-9));
}

TEST_CASE("amplitude margins of the reference tables") {
  // the polarization-product floor needs min_k a_k >= max_k p_k; these
  // margins make p up to 0.98 admissible at the quoted fields
  auto min_amplitude = [](const std::string& name, double b_z) {
    const auto env = fixture_environment(name);
    const double omega = 10.71 * b_z;
    double m = 1.0;
    for (const auto& s : env.spins) m = std::min(m, amplitude(s.coupling, omega));
    return m;
  };

  REQUIRE(min_amplitude("table1", 1.0) == Approx(0.998863830177).epsilon(1e-9));
  REQUIRE(min_amplitude("table1", 0.25) == Approx(0.984480056860).epsilon(1e-9));
  REQUIRE(min_amplitude("table2", 3.0) == Approx(0.999136993).epsilon(1e-8));
  REQUIRE(min_amplitude("table3", 3.0) == Approx(0.999749407).epsilon(1e-8));
  REQUIRE(min_amplitude("table4", 3.0) == Approx(0.999136993).epsilon(1e-8));
}

TEST_CASE("amplitude product of table1 at one tesla") {
  const auto env = fixture_environment("table1");
  double prod = 1.0;
  for (const auto& s : env.spins) prod *= std::abs(amplitude(s.coupling, 10.71));
  REQUIRE(prod == Approx(0.998189066858).epsilon(1e-9));
}

TEST_CASE("shared rows across tables are bitwise identical") {
  // the far-shell rows recur between realizations; the CSVs must agree
  const auto t1 = fixture_environment("table1");
  const auto t3 = fixture_environment("table3");
  // table1 k=7 and table3 k=4 are the same site
  REQUIRE(t1.spins[6].coupling.azx == t3.spins[3].coupling.azx);
  REQUIRE(t1.spins[6].coupling.azy == t3.spins[3].coupling.azy);
  REQUIRE(t1.spins[6].coupling.azz == t3.spins[3].coupling.azz);
  REQUIRE(t1.spins[6].coupling.r_nm.value() == t3.spins[3].coupling.r_nm.value());
}
