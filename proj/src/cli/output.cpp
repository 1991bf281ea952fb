#include "output.hpp"

#include <filesystem>
#include <fstream>
#include <map>

namespace twoway::cli {

namespace {

std::string unit_of(const std::string& column) {
    static const std::map<std::string, std::string> units{
        {"j", "index"},         {"lambda", "1/length"}, {"residual", "1"},    {"theta", "rad"},
        {"h", "1"},             {"g", "1"},             {"x", "length"},      {"f", "density"},
        {"N", "count"},         {"norm_squared", "1"},  {"L", "length"},      {"A_L", "1"},
        {"B_L", "1"},           {"c", "density"},       {"d", "density/length"}, {"flux", "density"},
        {"converged", "flag"},  {"r", "1"},             {"lambda_R", "1/length"}, {"N_r", "1"},
        {"bound", "1"}};
    if (auto it = units.find(column); it != units.end()) return it->second;
    if (column.rfind("v_", 0) == 0) return "1";
    return "1";
}

std::string annotate(const std::string& header) {
    std::string out, field;
    auto flush = [&] {
        if (!out.empty()) out += ',';
        out += field + " [" + unit_of(field) + "]";
        field.clear();
    };
    for (char ch : header) {
        if (ch == ',') flush();
        else field += ch;
    }
    flush();
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << text;
    if (!f) throw Error("write failed for " + path);
}

}  // namespace

Output::Output(const RunConfig& config) : command_(config.command), hash_(config_hash(config)), dir_(config.output) {
    std::filesystem::create_directories(dir_);
}

void Output::csv(const std::string& name, const std::string& body) const {
    const auto eol = body.find('\n');
    const std::string header = body.substr(0, eol);
    const std::string rest = eol == std::string::npos ? std::string() : body.substr(eol + 1);
    write_file(dir_ + "/" + name,
               "# twoway " + command_ + " config_hash=" + hash_ + "\n" + annotate(header) + "\n" + rest);
}

void Output::json(const std::string& name, const nlohmann::ordered_json& body) const {
    nlohmann::ordered_json doc{{"command", command_}, {"config_hash", hash_}};
    for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
    write_file(dir_ + "/" + name, doc.dump(2) + "\n");
}

}  // namespace twoway::cli
