#include "volterra/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace volterra {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

PeriodicOperator load_operator(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::bad_file, "cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::bad_file, path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("T") || !doc.contains("c") || !doc["c"].is_array())
        raise(Errc::bad_file, path + ": expected {\"T\": int, \"c\": [...]}");
    std::vector<double> c;
    for (const auto& v : doc["c"]) {
        if (!v.is_number()) raise(Errc::bad_file, path + ": non-numeric weight");
        c.push_back(v.get<double>());
    }
    if (doc["T"].get<long long>() != static_cast<long long>(c.size()))
        raise(Errc::bad_file, path + ": T disagrees with the weight count");
    return PeriodicOperator(std::move(c));
}

void save_operator(const PeriodicOperator& op, const std::string& path) {
    // hand-formatted so byte-identical reproducibility depends only on us
    std::ostringstream out;
    out << "{\"T\": " << op.period() << ", \"c\": [";
    for (int i = 0; i < op.period(); ++i) {
        if (i) out << ", ";
        out << format_double(op.c(i));
    }
    out << "]}\n";
    std::ofstream f(path);
    if (!f) raise(Errc::bad_file, "cannot write " + path);
    f << out.str();
}

}  // namespace volterra
