#include "patchcp/io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace patchcp {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_manifest(const Manifest& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_manifest: cannot open " + path);
    f << "# patchcp run manifest; bare lines below feed back through --config\n";
    f << "# command = " << m.command << "\n";
    f << "# version = " << m.version << "\n";
    f << "# started = " << m.started << "\n";
    f << "# finished = " << m.finished << "\n";
    f << "# output = " << m.output << "\n";
    for (const auto& [k, v] : m.params) f << k << " = " << v << "\n";
    if (!f) throw std::runtime_error("write_manifest: failed writing " + path);
}

KvList read_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_config: cannot open " + path);
    KvList out;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("read_config: " + path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("read_config: " + path + ":" + std::to_string(lineno) +
                                     ": empty key");
        }
        out.emplace_back(std::move(key), std::move(val));
    }
    return out;
}

std::string iso_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace patchcp
