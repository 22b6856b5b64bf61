#include "cavmatch/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace cavmatch {

CavityParams RunConfig::params() const {
    return CavityParams(mhz_to_rad(g_mhz), mhz_to_rad(kappa_mhz),
                        mhz_to_rad(gamma_mhz), rho0);
}

ShapeSpec RunConfig::shape_spec() const {
    ShapeSpec spec;
    spec.kind = shape;
    spec.tau_photon = us_to_s(tau_us);
    if (shape == ShapeKind::tabulated) {
        spec.samples = load_samples(samples_file);
    }
    return spec;
}

namespace {

std::vector<double> parse_value_list(const std::string& text,
                                     const std::string& what) {
    std::string cleaned = text;
    for (char& c : cleaned) {
        if (c == ',') c = ' ';
    }
    std::vector<double> out;
    std::istringstream in(cleaned);
    std::string tok;
    while (in >> tok) {
        try {
            size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ParseError(what + ": cannot parse '" + tok + "' as a number");
        }
    }
    return out;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }

    RunConfig cfg;
    try {
        cfg.g_mhz = tree.get<double>("cavity.g_mhz");
        cfg.kappa_mhz = tree.get<double>("cavity.kappa_mhz");
        cfg.gamma_mhz = tree.get<double>("cavity.gamma_mhz");
    } catch (const pt::ptree_error& e) {
        throw ParseError("config '" + path +
                         "': [cavity] needs g_mhz, kappa_mhz, gamma_mhz (" +
                         e.what() + ")");
    }
    try {
        cfg.rho0 = tree.get<double>("cavity.rho0", cfg.rho0);
        cfg.shape = shape_from_name(tree.get<std::string>("photon.shape", "sin2"));
        cfg.tau_us = tree.get<double>("photon.tau_us", cfg.tau_us);
        cfg.samples_file = tree.get<std::string>("photon.file", "");
        cfg.steps = tree.get<int>("grid.steps", cfg.steps);
        cfg.omega_max_mhz = tree.get<double>("limits.omega_max_mhz", 0.0);
        cfg.init = tree.get<std::string>("simulate.init", cfg.init);
        cfg.sweep_axis = tree.get<std::string>("sweep.axis", "");
        const std::string values = tree.get<std::string>("sweep.values", "");
        if (!values.empty()) {
            cfg.sweep_values = parse_value_list(values, "config [sweep] values");
        }
        cfg.alpha_re = tree.get<double>("timebin.alpha_re", cfg.alpha_re);
        cfg.alpha_im = tree.get<double>("timebin.alpha_im", cfg.alpha_im);
        cfg.beta_re = tree.get<double>("timebin.beta_re", cfg.beta_re);
        cfg.beta_im = tree.get<double>("timebin.beta_im", cfg.beta_im);
        cfg.gap_us = tree.get<double>("timebin.gap_us", cfg.gap_us);
    } catch (const pt::ptree_error& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }

    // Validate ranges before anything dispatches.
    if (!(cfg.g_mhz > 0.0) || !(cfg.kappa_mhz > 0.0) || !(cfg.gamma_mhz > 0.0)) {
        throw InvalidParams("config '" + path +
                            "': cavity rates must be positive MHz values");
    }
    if (!(cfg.rho0 >= 0.0) || !(cfg.rho0 < 1.0)) {
        throw InvalidParams("config '" + path + "': rho0 must lie in [0, 1)");
    }
    if (!(cfg.tau_us > 0.0)) {
        throw InvalidParams("config '" + path + "': tau_us must be positive");
    }
    if (cfg.steps < 2 || cfg.steps > (1 << 24)) {
        throw InvalidParams("config '" + path +
                            "': grid steps out of range [2, 2^24]");
    }
    if (cfg.omega_max_mhz < 0.0) {
        throw InvalidParams("config '" + path + "': omega_max_mhz must be >= 0");
    }
    if (cfg.init != "seeded" && cfg.init != "ground") {
        throw InvalidParams("config '" + path +
                            "': [simulate] init must be 'seeded' or 'ground'");
    }
    if (!cfg.sweep_axis.empty() && cfg.sweep_axis != "rho0" &&
        cfg.sweep_axis != "cooperativity") {
        throw InvalidParams("config '" + path +
                            "': [sweep] axis must be 'rho0' or 'cooperativity'");
    }
    if (cfg.shape == ShapeKind::tabulated) {
        if (cfg.samples_file.empty()) {
            throw InvalidParams("config '" + path +
                                "': tabulated shape needs [photon] file=");
        }
        if (!std::filesystem::exists(cfg.samples_file)) {
            throw InvalidParams("config '" + path + "': photon samples file '" +
                                cfg.samples_file + "' does not exist");
        }
    }
    if (!(cfg.gap_us >= 0.0)) {
        throw InvalidParams("config '" + path + "': gap_us must be >= 0");
    }
    return cfg;
}

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvFile::CsvFile(const std::string& path) : out_(path) {
    if (!out_) throw Error("cannot open '" + path + "' for writing");
}

void CsvFile::comment(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvFile::header(const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) out_ << ",";
        out_ << names[i];
    }
    out_ << "\n";
}

void CsvFile::row(const std::vector<std::string>& cells) { header(cells); }

JsonFile::JsonFile(const std::string& path) : out_(path) {
    if (!out_) throw Error("cannot open '" + path + "' for writing");
    out_ << "{\n";
}

JsonFile::~JsonFile() {
    try {
        close();
    } catch (...) {
    }
}

void JsonFile::field(const std::string& name, double value) {
    if (!first_) out_ << ",\n";
    first_ = false;
    if (std::isfinite(value)) {
        out_ << "  \"" << name << "\": " << fmt_g17(value);
    } else {
        out_ << "  \"" << name << "\": null";
    }
}

void JsonFile::field(const std::string& name, int value) {
    if (!first_) out_ << ",\n";
    first_ = false;
    out_ << "  \"" << name << "\": " << value;
}

void JsonFile::field(const std::string& name, const std::string& value) {
    if (!first_) out_ << ",\n";
    first_ = false;
    out_ << "  \"" << name << "\": \"";
    for (char c : value) {
        if (c == '"' || c == '\\') out_ << '\\';
        out_ << c;
    }
    out_ << "\"";
}

void JsonFile::close() {
    if (closed_) return;
    closed_ = true;
    out_ << "\n}\n";
    out_.close();
}

ControlPulse read_pulse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open pulse file '" + path + "'");

    std::vector<double> t_us, omega_mhz;
    int t_col = -1, omega_col = -1;
    bool have_header = false;
    std::string line;
    int lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);

        if (!have_header) {
            for (size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == "t_us") t_col = int(i);
                if (cells[i] == "omega_mhz") omega_col = int(i);
            }
            if (t_col < 0 || omega_col < 0) {
                std::ostringstream msg;
                msg << "pulse file '" << path << "' row " << lineno
                    << ": header must contain t_us and omega_mhz columns";
                throw ParseError(msg.str());
            }
            have_header = true;
            continue;
        }

        const int needed = std::max(t_col, omega_col) + 1;
        if (int(cells.size()) < needed) {
            std::ostringstream msg;
            msg << "pulse file '" << path << "' row " << lineno << ": expected "
                << needed << " columns, got " << cells.size();
            throw ParseError(msg.str());
        }
        const auto parse_cell = [&](int col) {
            try {
                size_t used = 0;
                const double v = std::stod(cells[col], &used);
                if (used != cells[col].size()) throw std::invalid_argument("");
                return v;
            } catch (const std::exception&) {
                std::ostringstream msg;
                msg << "pulse file '" << path << "' row " << lineno << " column "
                    << (col + 1) << ": cannot parse '" << cells[col]
                    << "' as a number";
                throw ParseError(msg.str());
            }
        };
        t_us.push_back(parse_cell(t_col));
        omega_mhz.push_back(parse_cell(omega_col));
    }

    if (t_us.size() < 3) {
        throw ParseError("pulse file '" + path + "' has fewer than 3 data rows");
    }

    const int n = int(t_us.size()) - 1;
    const TimeGrid grid(us_to_s(t_us.front()), us_to_s(t_us.back()), n);
    // The time column must actually be the uniform grid it claims to be.
    for (int k = 0; k <= n; ++k) {
        const double expect = s_to_us(grid.t(k));
        if (std::abs(t_us[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
            std::ostringstream msg;
            msg << "pulse file '" << path << "' row " << (k + 2)
                << ": t_us=" << t_us[k] << " deviates from the uniform grid ("
                << expect << ")";
            throw ParseError(msg.str());
        }
    }

    ControlPulse pulse{grid, Eigen::ArrayXd(n + 1)};
    for (int k = 0; k <= n; ++k) pulse.omega[k] = mhz_to_rad(omega_mhz[k]);
    return pulse;
}

}  // namespace cavmatch
