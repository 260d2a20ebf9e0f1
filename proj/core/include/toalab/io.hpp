#pragma once

#include <filesystem>
#include <string>

#include "toalab/hilbert.hpp"
#include "toalab/toa.hpp"
#include "toalab/wavepacket.hpp"

namespace toalab {

// %.17g: round-trips every double.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Matrices are row lists of [re, im] pairs; a bare number is accepted for a real entry.
// Keys: schema_version, hamiltonian, projector_P, outcomes [{label, operator}], rho0,
// optional h0 + h_int, exclusive_outcomes, initial_support. Unknown keys are rejected.
std::string transition_system_to_json(const TransitionSystem& system);
TransitionSystem transition_system_from_json(const std::string& text, const TransitionSystemOptions& defaults = {});

InitialSupport initial_support_from_string(const std::string& name);
std::string to_string(InitialSupport support);

// Columns p, re, im on the momentum grid nodes.
std::string wavepacket_to_csv(const WavePacket& state);
WavePacket wavepacket_from_csv(const std::string& text);

// Columns t, value.
std::string density_to_csv(const ToADensity& density);
// Grid, sampling and diagnostics; metadata_json (an object) is embedded under "metadata".
std::string density_sidecar(const ToADensity& density, const std::string& metadata_json = "{}");
ToADensity density_from_files(const std::string& csv, const std::string& sidecar);

std::string to_string(Sampling sampling);
Sampling sampling_from_string(const std::string& name);

}  // namespace toalab
