#pragma once

#include <string>
#include <utility>
#include <vector>

namespace patchcp {

inline constexpr const char* kVersion = "0.1.0";

// %.17g: shortest text that survives a double round trip.
std::string fmt_g17(double x);

// Ordered key/value pairs; order is part of the output format.
using KvList = std::vector<std::pair<std::string, std::string>>;

// Everything needed to rerun a command byte-for-byte. `params` holds the
// merged experiment parameters (flags over config over defaults) and is the
// part written as bare "key = value" lines, so the manifest itself can be
// fed back through --config. Bookkeeping goes into comment lines.
struct Manifest {
    std::string command;
    std::string version = kVersion;
    std::string started;   // ISO-8601 UTC
    std::string finished;  // ISO-8601 UTC
    std::string output;    // primary CSV path
    KvList params;
};

void write_manifest(const Manifest& m, const std::string& path);

// Parses "key = value" lines. '#' starts a comment, blank lines are skipped.
// Throws std::runtime_error on unreadable files or lines without '='.
KvList read_config(const std::string& path);

std::string iso_now();

}  // namespace patchcp
