#include "pexmap/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pexmap/errors.hpp"

namespace pexmap {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json params_to_json(const Params& p) {
    return {{"r", p.r}, {"gamma", p.gamma}, {"eps1", p.eps1}, {"eps2", p.eps2}};
}

Params params_from_json(const nlohmann::json& j) {
    return validate_params(j.at("r").get<int>(), j.at("gamma").get<int>(),
                           j.at("eps1").get<double>(), j.at("eps2").get<double>());
}

Params params_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw OutsideDomain("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return params_from_json(j);
}

nlohmann::json meta_block(const Params& p, uint64_t seed) {
    return {{"version", kVersion}, {"params", params_to_json(p)}, {"seed", seed}};
}

nlohmann::json make_envelope(const Params& p, uint64_t seed) {
    nlohmann::json j;
    j["meta"] = meta_block(p, seed);
    j["timestamp"] = timestamp_utc();
    return j;
}

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_preamble(const Params& p, uint64_t seed) {
    std::ostringstream os;
    os << "# version=" << kVersion << " params=" << params_to_json(p).dump()
       << " seed=" << seed << "\n";
    os << "# timestamp=" << timestamp_utc() << "\n";
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw OutsideDomain("cannot open output file: " + path);
    out << text;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw OutsideDomain("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace pexmap
