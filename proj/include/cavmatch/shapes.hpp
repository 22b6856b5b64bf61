#pragma once

#include "cavmatch/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cavmatch {

enum class ShapeKind { sin2, twin_peak, tabulated };

const char* shape_name(ShapeKind kind);
ShapeKind shape_from_name(const std::string& name);

struct ShapeSpec {
    ShapeKind kind = ShapeKind::sin2;
    double tau_photon = 0.0;  // s, analytic kinds
    // (t [s], amplitude) pairs for the tabulated kind; amplitude scale is
    // arbitrary (the waveform is renormalized).
    std::vector<std::pair<double, double>> samples;
};

// A sin^2(pi t / tau) pulse on [0, tau], normalized analytically:
// the squared-shape integral is 3 tau / 8, so the prefactor is sqrt(8/(3 tau)).
PhotonWaveform make_sin2(double tau_photon);

// sin^2(2 pi t / tau) * cos((pi/2)(1 - t/tau)) on [0, tau]: two peaks with
// the later one larger.  The squared-shape integral is 3 tau / 16, giving
// the prefactor 4 / sqrt(3 tau).
PhotonWaveform make_twin_peak(double tau_photon);

// Interpolate tabulated samples with a cubic spline (clamped to zero slope
// at the left end, not-a-knot at the right), shift the support to start at
// t = 0, and renormalize to unit L2 norm.  d1/d2 come from the interpolant.
PhotonWaveform from_samples(const ShapeSpec& spec);

PhotonWaveform make_waveform(const ShapeSpec& spec);

// Same shape, support moved to start offset seconds later.
PhotonWaveform shift_support(const PhotonWaveform& w, double offset);

// Same shape with the support translated to start at t = 0.  Translation
// views are unwrapped rather than stacked, so two shifted copies of one base
// waveform localize to bitwise-identical functions.
PhotonWaveform localize_support(const PhotonWaveform& w);

// Two-column text file: time in microseconds, amplitude; '#' starts a
// comment; blank lines ignored.  Times are returned in seconds.
std::vector<std::pair<double, double>> load_samples(const std::string& path);

}  // namespace cavmatch
