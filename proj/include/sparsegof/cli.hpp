#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sparsegof::cli {

inline constexpr int kExitAccept = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitReject = 3;

/// Environment variable overriding the default simulation seed.
inline constexpr const char* kSeedEnv = "SPARSEGOF_SEED";
inline constexpr std::uint64_t kDefaultSeed = 20100401;

/// Seed from SPARSEGOF_SEED when set and valid, otherwise kDefaultSeed.
std::uint64_t default_seed();

/// Probability vector from a reference name (f1..f4, fp1..fp4) or a file.
std::vector<double> resolve_distribution(const std::string& spec);

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparsegof::cli
