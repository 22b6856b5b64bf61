#pragma once

#include "cavmatch/model.hpp"
#include "cavmatch/shapes.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace cavmatch {

// Everything a run needs, as read from an INI-style config file.  Rates are
// MHz and times microseconds at this boundary; params()/shape_spec() convert
// to internal units once.
struct RunConfig {
    // [cavity]
    double g_mhz = 0.0;
    double kappa_mhz = 0.0;
    double gamma_mhz = 0.0;
    double rho0 = 0.005;

    // [photon]
    ShapeKind shape = ShapeKind::sin2;
    double tau_us = 3.14;
    std::string samples_file;  // tabulated kind only

    // [grid]
    int steps = 16384;

    // [limits]
    double omega_max_mhz = 0.0;  // 0 = uncapped

    // [simulate]
    std::string init = "seeded";  // "seeded" (c_e = sqrt(rho0)) or "ground"

    // [sweep]
    std::string sweep_axis;  // "rho0" or "cooperativity"
    std::vector<double> sweep_values;

    // [timebin]
    double alpha_re = 0.70710678118654752;
    double alpha_im = 0.0;
    double beta_re = -0.70710678118654752;
    double beta_im = 0.0;
    double gap_us = 0.5;

    CavityParams params() const;
    ShapeSpec shape_spec() const;  // reads samples_file for tabulated shapes
};

// Parse and validate; throws ParseError / InvalidParams on bad content.
RunConfig load_config(const std::string& path);

// "%.17g" — enough digits to round-trip any double exactly, so emitted
// files are byte-stable and lossless.
std::string fmt_g17(double v);

// CSV with '#' metadata lines, a header row, comma delimiter, '.' decimal.
class CsvFile {
public:
    explicit CsvFile(const std::string& path);
    void comment(const std::string& line);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
};

// Flat JSON object writer with insertion-ordered keys.
class JsonFile {
public:
    explicit JsonFile(const std::string& path);
    ~JsonFile();
    void field(const std::string& name, double value);
    void field(const std::string& name, int value);
    void field(const std::string& name, const std::string& value);
    void close();

private:
    std::ofstream out_;
    bool first_ = true;
    bool closed_ = false;
};

// Read a pulse CSV as written by the derive command (needs t_us and
// omega_mhz columns).  Returns the pulse in internal units; the grid is
// reconstructed from the time column.
ControlPulse read_pulse_csv(const std::string& path);

}  // namespace cavmatch
