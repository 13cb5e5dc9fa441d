#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/format.hpp"
#include "nvpol/io.hpp"

// Bundled coupling-table fixtures: four published 8-spin environment
// realizations (couplings in rad/us, distances in nm), polarizations zero
// until assigned. table1 belongs with B = 1 T runs, table2..table4 with
// B = 3 T runs. Checksummed so accidental edits are caught at run time.

namespace nvpol {
namespace fixture_detail {

inline constexpr const char* table1_csv =
    "k,r_nm,Azx_per_us,Azy_per_us,Azz_per_us,p\n"
    "1,2.169540,-0.017784,-0.007206,-0.034589,0.000000\n"
    "2,2.331890,0.013514,-0.003004,-0.028353,0.000000\n"
    "3,1.031320,0.505446,-0.135434,0.257915,0.000000\n"
    "4,2.454350,-0.001277,0.004767,-0.025882,0.000000\n"
    "5,2.551040,0.017444,-0.028528,0.001358,0.000000\n"
    "6,1.542910,-0.137190,0.036760,0.122291,0.000000\n"
    "7,1.031320,-0.251613,-0.251613,-0.215682,0.000000\n"
    "8,2.357730,-0.041094,-0.011011,0.027203,0.000000\n";

inline constexpr const char* table2_csv =
    "k,r_nm,Azx_per_us,Azy_per_us,Azz_per_us,p\n"
    "1,0.504420,1.376170,0.000000,0.973096,0.000000\n"
    "2,0.563960,-0.689293,0.170556,-0.417774,0.000000\n"
    "3,0.617780,0.499393,0.000000,-0.353124,0.000000\n"
    "4,0.636800,-0.013411,-0.116145,-0.474160,0.000000\n"
    "5,0.684920,-0.372671,0.161371,-0.223990,0.000000\n"
    "6,1.031320,-0.251613,-0.251613,-0.215682,0.000000\n"
    "7,1.542910,-0.137190,0.036760,0.122291,0.000000\n"
    "8,2.551040,0.017444,-0.028528,0.001358,0.000000\n";

inline constexpr const char* table3_csv =
    "k,r_nm,Azx_per_us,Azy_per_us,Azz_per_us,p\n"
    "1,0.563960,0.196941,0.682223,-0.417774,0.000000\n"
    "2,0.563960,0.492352,-0.511667,-0.417774,0.000000\n"
    "3,0.667280,0.000000,0.000000,-0.420338,0.000000\n"
    "4,1.031320,-0.251613,-0.251613,-0.215682,0.000000\n"
    "5,1.542910,-0.137190,0.036760,0.122291,0.000000\n"
    "6,2.169540,-0.017784,-0.007206,-0.034589,0.000000\n"
    "7,2.357730,-0.041094,-0.011011,0.027203,0.000000\n"
    "8,2.551040,0.017444,-0.028528,0.001358,0.000000\n";

inline constexpr const char* table4_csv =
    "k,r_nm,Azx_per_us,Azy_per_us,Azz_per_us,p\n"
    "1,0.504420,1.376170,0.000000,0.973096,0.000000\n"
    "2,0.563960,0.492352,-0.511667,-0.417774,0.000000\n"
    "3,0.617780,0.499393,0.000000,-0.353124,0.000000\n"
    "4,0.636800,-0.013411,-0.116145,-0.474160,0.000000\n"
    "5,0.667280,0.000000,0.000000,-0.420338,0.000000\n"
    "6,1.031320,-0.251613,-0.251613,-0.215682,0.000000\n"
    "7,1.542910,-0.137190,0.036760,0.122291,0.000000\n"
    "8,2.169540,-0.017784,-0.007206,-0.034589,0.000000\n";

// FNV-1a of the CSV text above, frozen when the fixtures were embedded
inline constexpr std::uint64_t table1_checksum = 0x4071952481223644ULL;
inline constexpr std::uint64_t table2_checksum = 0x70e1c37c1ccf8eb9ULL;
inline constexpr std::uint64_t table3_checksum = 0x4819725522e8b138ULL;
inline constexpr std::uint64_t table4_checksum = 0x9089b243d5e1d31dULL;

}  // namespace fixture_detail

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"table1", "table2", "table3", "table4"};
  return names;
}

inline const char* fixture_csv(const std::string& name) {
  using namespace fixture_detail;
  if (name == "table1") return table1_csv;
  if (name == "table2") return table2_csv;
  if (name == "table3") return table3_csv;
  if (name == "table4") return table4_csv;
  throw ValidationError("unknown fixture '" + name + "' (table1..table4)");
}

inline std::uint64_t fixture_checksum(const std::string& name) {
  using namespace fixture_detail;
  if (name == "table1") return table1_checksum;
  if (name == "table2") return table2_checksum;
  if (name == "table3") return table3_checksum;
  if (name == "table4") return table4_checksum;
  throw ValidationError("unknown fixture '" + name + "' (table1..table4)");
}

inline void verify_fixture_integrity() {
  for (const auto& name : fixture_names()) {
    const auto actual = detail::fnv1a64(fixture_csv(name));
    if (actual != fixture_checksum(name))
      throw ValidationError("fixture " + name + " failed its checksum (got " +
                            detail::to_hex(actual) + ", expected " +
                            detail::to_hex(fixture_checksum(name)) + ")");
  }
}

// parse a bundled table into an environment (B_z and polarizations still
// to be assigned by the caller)
inline EnvironmentRealization fixture_environment(const std::string& name) {
  return environment_from_csv(fixture_csv(name));
}

}  // namespace nvpol
