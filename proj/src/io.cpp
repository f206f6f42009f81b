#include "cane/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cane/error.hpp"

namespace cane {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kSnapshotVersion = 1;

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    try {
        const long long v = std::stoll(value);
        if (v < 0) throw std::out_of_range(value);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs a nonnegative integer, got '" +
                          value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "' needs true/false, got '" + value + "'");
}

ordered_json config_to_json(const TrainConfig& cfg) {
    ordered_json j;
    j["d"] = cfg.d;
    j["k"] = cfg.k;
    j["alpha"] = cfg.alpha;
    j["topn"] = cfg.topn;
    j["lr"] = cfg.lr;
    j["epochs"] = cfg.epochs;
    j["patience"] = cfg.patience;
    j["negatives_per_positive"] = cfg.negatives_per_positive;
    j["batch_size"] = cfg.batch_size;
    j["seed"] = cfg.seed;
    j["variant"] = to_string(cfg.variant);
    j["train_frac"] = cfg.train_frac;
    j["test_frac"] = cfg.test_frac;
    j["val_frac"] = cfg.val_frac;
    j["same_type_negatives"] = cfg.same_type_negatives;
    j["separate_heads"] = cfg.separate_heads;
    return j;
}

TrainConfig config_from_json(const ordered_json& j) {
    TrainConfig cfg;
    cfg.d = j.at("d").get<std::size_t>();
    cfg.k = j.at("k").get<std::size_t>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.topn = j.at("topn").get<std::size_t>();
    cfg.lr = j.at("lr").get<double>();
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.patience = j.at("patience").get<std::size_t>();
    cfg.negatives_per_positive = j.at("negatives_per_positive").get<std::size_t>();
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.variant = variant_from_string(j.at("variant").get<std::string>());
    cfg.train_frac = j.at("train_frac").get<double>();
    cfg.test_frac = j.at("test_frac").get<double>();
    cfg.val_frac = j.at("val_frac").get<double>();
    cfg.same_type_negatives = j.at("same_type_negatives").get<bool>();
    cfg.separate_heads = j.at("separate_heads").get<bool>();
    return cfg;
}

ordered_json matrix_to_json(const DenseMatrix& mat) {
    ordered_json j;
    j["rows"] = mat.rows();
    j["cols"] = mat.cols();
    j["data"] = mat.data();
    return j;
}

DenseMatrix matrix_from_json(const ordered_json& j) {
    DenseMatrix mat(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != mat.size()) throw ParseError("snapshot matrix payload size mismatch");
    mat.data() = data;
    return mat;
}

ordered_json scorer_to_json(const ScorerParams& p) {
    ordered_json j;
    j["w1"] = matrix_to_json(p.w1);
    j["b1"] = p.b1;
    j["w2"] = matrix_to_json(p.w2);
    j["b2"] = p.b2;
    j["w3"] = p.w3;
    j["b3"] = p.b3;
    return j;
}

ScorerParams scorer_from_json(const ordered_json& j) {
    ScorerParams p;
    p.w1 = matrix_from_json(j.at("w1"));
    p.b1 = j.at("b1").get<std::vector<double>>();
    p.w2 = matrix_from_json(j.at("w2"));
    p.b2 = j.at("b2").get<std::vector<double>>();
    p.w3 = j.at("w3").get<std::vector<double>>();
    p.b3 = j.at("b3").get<double>();
    return p;
}

}  // namespace

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open config file: " + path);
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        entries[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
    }
    return entries;
}

void apply_config_entries(TrainConfig& cfg, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "d") {
            cfg.d = parse_size(key, value);
        } else if (key == "k") {
            cfg.k = parse_size(key, value);
        } else if (key == "alpha") {
            cfg.alpha = parse_double(key, value);
        } else if (key == "topn") {
            cfg.topn = parse_size(key, value);
        } else if (key == "lr") {
            cfg.lr = parse_double(key, value);
        } else if (key == "epochs") {
            cfg.epochs = parse_size(key, value);
        } else if (key == "patience") {
            cfg.patience = parse_size(key, value);
        } else if (key == "negatives_per_positive") {
            cfg.negatives_per_positive = parse_size(key, value);
        } else if (key == "batch_size") {
            cfg.batch_size = parse_size(key, value);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_size(key, value));
        } else if (key == "variant") {
            cfg.variant = variant_from_string(value);
        } else if (key == "train_frac") {
            cfg.train_frac = parse_double(key, value);
        } else if (key == "test_frac") {
            cfg.test_frac = parse_double(key, value);
        } else if (key == "val_frac") {
            cfg.val_frac = parse_double(key, value);
        } else if (key == "same_type_negatives") {
            cfg.same_type_negatives = parse_bool(key, value);
        } else if (key == "separate_heads") {
            cfg.separate_heads = parse_bool(key, value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

TrainConfig load_config_file(const std::string& path) {
    TrainConfig cfg;
    apply_config_entries(cfg, read_kv_file(path));
    return cfg;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open file for digest: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[4096];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
    return out;
}

void save_snapshot(const std::string& path, const Snapshot& snapshot) {
    ordered_json j;
    j["format"] = "cane-snapshot";
    j["version"] = kSnapshotVersion;
    j["config"] = config_to_json(snapshot.cfg);
    j["n"] = snapshot.n;
    j["m"] = snapshot.m;
    j["base"] = matrix_to_json(snapshot.state.base);
    j["scorer"] = snapshot.state.scorer ? scorer_to_json(*snapshot.state.scorer)
                                        : ordered_json(nullptr);
    j["scorer_attr"] = snapshot.state.scorer_attr ? scorer_to_json(*snapshot.state.scorer_attr)
                                                  : ordered_json(nullptr);
    std::ofstream out(path);
    if (!out) throw FileError("cannot write snapshot: " + path);
    out << j.dump() << "\n";
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open snapshot: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("snapshot " + path + ": " + e.what());
    }
    if (j.value("format", "") != "cane-snapshot") {
        throw ParseError("snapshot " + path + ": not a cane snapshot");
    }
    if (j.value("version", -1) != kSnapshotVersion) {
        throw CompatibilityError("snapshot " + path + ": unsupported version");
    }
    Snapshot snapshot;
    snapshot.cfg = config_from_json(j.at("config"));
    snapshot.n = j.at("n").get<std::size_t>();
    snapshot.m = j.at("m").get<std::size_t>();
    snapshot.state.base = matrix_from_json(j.at("base"));
    if (!j.at("scorer").is_null()) snapshot.state.scorer = scorer_from_json(j.at("scorer"));
    if (!j.at("scorer_attr").is_null()) {
        snapshot.state.scorer_attr = scorer_from_json(j.at("scorer_attr"));
    }
    return snapshot;
}

void write_embeddings_csv(const std::string& path, const DenseMatrix& last_layer,
                          std::size_t n_nodes) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write embeddings: " + path);
    out << "node";
    for (std::size_t c = 0; c < last_layer.cols(); ++c) out << ",dim" << c;
    out << "\n";
    char cell[32];
    for (std::size_t v = 0; v < n_nodes; ++v) {
        out << v;
        for (const double x : last_layer.row(v)) {
            std::snprintf(cell, sizeof(cell), "%.17g", x);
            out << ',' << cell;
        }
        out << "\n";
    }
}

std::string metrics_line(const EpochMetrics& entry, bool with_seconds) {
    ordered_json j;
    j["epoch"] = entry.epoch;
    j["loss"] = entry.loss;
    j["val_auc"] = entry.val_auc;
    j["val_ap"] = entry.val_ap;
    if (with_seconds) j["seconds"] = entry.seconds;
    return j.dump();
}

void write_metrics_log(const std::string& path, const std::vector<EpochMetrics>& history) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write metrics log: " + path);
    for (const auto& entry : history) out << metrics_line(entry, false) << "\n";
}

}  // namespace cane
