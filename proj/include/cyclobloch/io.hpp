#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cyclobloch/fiber.hpp"
#include "cyclobloch/observables.hpp"
#include "cyclobloch/strip.hpp"
#include "cyclobloch/transport.hpp"

namespace cyclobloch {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* FNV-1a over the data section; embedded in every output header so a
 * file certifies its own integrity and reruns can be diffed. */
std::uint64_t fnv1a(const std::string& text);

/* Shortest round-trip decimal form (deterministic across runs). */
std::string format_double(double v);

/* Key=value lines of the resolved model configuration. */
std::vector<std::string> config_header(const ModelConfig& cfg);

/* "# key=value" header lines + "# content_fnv1a=..." + column row + data
 * rows. */
std::string compose_csv(const std::vector<std::string>& meta,
                        const std::string& columns,
                        const std::string& rows);

/* Write via a temporary file and rename (atomic per output). */
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

std::string serialize_series(const ObservableSeries& series,
                             const std::vector<std::string>& meta);

std::string serialize_profile(const EtaProfile& profile,
                              const std::vector<std::string>& meta);

std::string serialize_spectrum(const SpectrumResult& spectrum,
                               const std::vector<std::string>& meta);

std::string serialize_line(const DiabaticLine& line,
                           const std::vector<std::string>& meta);

/* (l, m, Re, Im) rows; the header carries gauge, t, beta and the strip
 * extents so the packet reconstructs exactly. */
std::string serialize_packet(const WavePacket& psi,
                             const std::vector<std::string>& meta);

WavePacket parse_packet(const std::string& text);
WavePacket read_packet(const std::string& path);

std::string serialize_fit(const FitResult& fit, const std::string& label);

}  // namespace cyclobloch
