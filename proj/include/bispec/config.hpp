#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bispec/gdm.hpp"
#include "bispec/pipeline.hpp"

namespace bispec {

inline constexpr const char* version = "1.0.0";

enum class ProbeKind { PDC, TFM, Fock, Coherent, PACS };
enum class Engine { ClosedForm, GDM, Both };
enum class OutputFormat { CSV, JSON };

const char* to_string(ProbeKind k);
const char* to_string(Engine e);

struct ProbeSpec {
    ProbeKind kind = ProbeKind::PDC;
    // pdc
    std::vector<double> sigma_p_cm, T_qent;
    double alpha_over_hbar = 0.01;
    units::WavenumberConvention wavenumber = units::WavenumberConvention::Linear;
    int n_modes = 0;
    bool postselect = false;
    // tfm
    std::vector<double> theta_t;
    double k1 = 1.3, k2 = 1.3;
    // single pulses
    EnvelopeKind envelope = EnvelopeKind::Exponential;
    std::vector<double> tau;
    double t_ar = -1;     // gaussian centre, negative selects 6 tau
    int N = 1;            // photon number or added photons
    double amplitude = 1; // coherent amplitude scale: alpha(t) = amplitude xi(t)
};

struct ExperimentConfig {
    MatterSystem matter;
    std::string frequency_units = "rad/ps";
    ProbeSpec probe;
    Param theta = Param::Gamma;
    Engine engine = Engine::ClosedForm;
    bool grid_refine = true;
    int n_points = 0; // samples for single-pulse grids, 0 selects automatic
    GDMOptions gdm;
    std::string output_path;
    OutputFormat format = OutputFormat::CSV;
};

// Field-path error messages, empty when the document is valid.
std::vector<std::string> validate_config(const std::string& json_text);
// Throws InvalidArgument with all messages joined when validation fails.
ExperimentConfig parse_config(const std::string& json_text);

struct SweepTable {
    std::vector<std::string> header; // provenance lines, "key: value"
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

extern const std::vector<std::string> pdc_columns;
extern const std::vector<std::string> tfm_columns;
extern const std::vector<std::string> pulse_columns;

SweepTable run_experiment(const ExperimentConfig& cfg, bool with_timestamp = true);

void write_csv(std::ostream& os, const SweepTable& t);
void write_json(std::ostream& os, const SweepTable& t);

} // namespace bispec
