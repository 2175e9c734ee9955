#include "fwr/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fwr/errors.hpp"

namespace fwr {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        if (line[k] == '"') in_str = !in_str;
        if (line[k] == '#' && !in_str) return line.substr(0, k);
    }
    return line;
}

Json parse_toml_value(const std::string& raw) {
    std::string v = trim(raw);
    if (v.empty()) throw ConfigInvalid("toml: empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ConfigInvalid("toml: unterminated string");
        return Json(v.substr(1, v.size() - 2));
    }
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigInvalid("toml: unterminated array");
        Json arr = Json::array();
        std::string inner = v.substr(1, v.size() - 2);
        std::string item;
        bool in_str = false;
        for (char c : inner) {
            if (c == '"') in_str = !in_str;
            if (c == ',' && !in_str) {
                if (!trim(item).empty()) arr.push_back(parse_toml_value(item));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!trim(item).empty()) arr.push_back(parse_toml_value(item));
        return arr;
    }
    if (v == "true") return Json(true);
    if (v == "false") return Json(false);
    try {
        std::size_t used = 0;
        if (v.find_first_of(".eEinf") == std::string::npos) {
            long long i = std::stoll(v, &used);
            if (used == v.size()) return Json(i);
        }
        double d = std::stod(v, &used);
        if (used == v.size()) return Json(d);
    } catch (const std::exception&) {
    }
    throw ConfigInvalid("toml: cannot parse value '" + v + "'");
}

}  // namespace

Json parse_toml_subset(const std::string& text) {
    Json root = Json::object();
    Json* table = &root;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigInvalid("toml: bad table header at line " + std::to_string(lineno));
            std::string name = trim(line.substr(1, line.size() - 2));
            table = &root;
            std::istringstream parts(name);
            std::string part;
            while (std::getline(parts, part, '.')) {
                part = trim(part);
                if (part.empty())
                    throw ConfigInvalid("toml: empty table name at line " + std::to_string(lineno));
                table = &(*table)[part];
            }
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid("toml: expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigInvalid("toml: empty key at line " + std::to_string(lineno));
        if (key.front() == '"' && key.back() == '"' && key.size() >= 2)
            key = key.substr(1, key.size() - 2);
        (*table)[key] = parse_toml_value(line.substr(eq + 1));
    }
    return root;
}

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::filesystem::path p(path);
    if (p.extension() == ".toml") return parse_toml_subset(buf.str());
    if (p.extension() == ".json") {
        try {
            return Json::parse(buf.str());
        } catch (const Json::parse_error& e) {
            throw ConfigInvalid(std::string("json: ") + e.what());
        }
    }
    throw ConfigInvalid("unsupported config extension (want .json or .toml): " + path);
}

void atomic_write(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("atomic_write: cannot open " + tmp.string());
        out << content;
        if (!out.good()) throw Error("atomic_write: short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

std::string trajectory_csv(const ReflectedTrajectory& traj) {
    std::string out;
    int d = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
    out += "t";
    for (int c = 0; c < d; ++c) out += ",x_" + std::to_string(c + 1);
    out += ",xi,on_boundary\n";
    char buf[64];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
        out += buf;
        for (int c = 0; c < d; ++c) {
            std::snprintf(buf, sizeof buf, ",%.17g", traj.states[k][c]);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g,%d", traj.local_time[k],
                      static_cast<int>(traj.boundary_flags[k]));
        out += buf;
        out += '\n';
    }
    return out;
}

Json matrix_to_json(const QuasipotentialMatrix& m) {
    Json j;
    j["variant"] = m.variant == Variant::Avoiding ? "avoiding" : "plain";
    switch (m.provenance) {
        case Provenance::Optimized: j["provenance"] = "optimized"; break;
        case Provenance::Oracle: j["provenance"] = "oracle"; break;
        case Provenance::UserSupplied: j["provenance"] = "user_supplied"; break;
    }
    j["labels"] = m.labels;
    Json rows = Json::array();
    for (int i = 0; i < m.size(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < m.size(); ++k) row.push_back(m.values(i, k));
        rows.push_back(row);
    }
    j["values"] = rows;
    if (!m.equilibria.empty()) {
        Json eq = Json::array();
        for (const Equilibrium& e : m.equilibria) {
            Json je;
            je["index"] = e.index;
            je["stable"] = e.stable;
            je["location"] = std::vector<double>(e.location.data(),
                                                 e.location.data() + e.location.size());
            eq.push_back(je);
        }
        j["equilibria"] = eq;
    }
    return j;
}

QuasipotentialMatrix matrix_from_json(const Json& j) {
    QuasipotentialMatrix m;
    if (!j.contains("values") || !j["values"].is_array())
        throw ConfigInvalid("matrix: missing 'values'");
    int l = static_cast<int>(j["values"].size());
    m.values = Mat::Zero(l, l);
    for (int i = 0; i < l; ++i) {
        if (static_cast<int>(j["values"][i].size()) != l)
            throw InconsistentMatrix("matrix: ragged 'values'");
        for (int k = 0; k < l; ++k) m.values(i, k) = j["values"][i][k].get<double>();
    }
    if (j.contains("labels"))
        m.labels = j["labels"].get<std::vector<std::string>>();
    else
        for (int i = 0; i < l; ++i) m.labels.push_back("O_" + std::to_string(i + 1));
    if (static_cast<int>(m.labels.size()) != l)
        throw InconsistentMatrix("matrix: labels/values size mismatch");
    std::string variant = j.value("variant", "plain");
    if (variant == "plain")
        m.variant = Variant::Plain;
    else if (variant == "avoiding")
        m.variant = Variant::Avoiding;
    else
        throw ConfigInvalid("matrix: unknown variant '" + variant + "'");
    std::string prov = j.value("provenance", "user_supplied");
    if (prov == "optimized")
        m.provenance = Provenance::Optimized;
    else if (prov == "oracle")
        m.provenance = Provenance::Oracle;
    else if (prov == "user_supplied")
        m.provenance = Provenance::UserSupplied;
    else
        throw ConfigInvalid("matrix: unknown provenance '" + prov + "'");
    m.validate(1e-9);
    return m;
}

Json tree_to_json(const CycleNode& node, const std::vector<std::string>& labels) {
    Json j;
    Json members = Json::array();
    for (int m : node.members) members.push_back(labels.at(m));
    j["members"] = members;
    j["rank"] = node.rank;
    j["bottom"] = labels.at(node.bottom);
    if (std::isfinite(node.A)) j["A"] = node.A;
    j["C"] = node.C;
    if (node.exit_target >= 0) j["exit_target"] = labels.at(node.exit_target);
    if (!node.leaf()) {
        Json ch = Json::array();
        for (const CycleNode& c : node.children) ch.push_back(tree_to_json(c, labels));
        j["children"] = ch;
    }
    return j;
}

Json profile_to_json(const MetastableProfile& p, const std::vector<std::string>& labels) {
    Json j;
    j["start"] = labels.at(p.start);
    j["thresholds"] = p.thresholds;
    Json states = Json::array();
    for (int s : p.states) states.push_back(labels.at(s));
    j["states"] = states;
    return j;
}

}  // namespace fwr
