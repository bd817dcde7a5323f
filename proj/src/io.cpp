#include "cyclobloch/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace cyclobloch {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> config_header(const ModelConfig& cfg) {
  std::vector<std::string> meta;
  meta.push_back("Jx=" + format_double(cfg.Jx));
  meta.push_back("Jy=" + format_double(cfg.Jy));
  meta.push_back("alpha=" + format_double(cfg.alpha));
  meta.push_back("F=" + format_double(cfg.F));
  if (cfg.dir.rational) {
    meta.push_back("r=" + std::to_string(cfg.dir.r));
    meta.push_back("q=" + std::to_string(cfg.dir.q));
  } else {
    meta.push_back("beta=" + format_double(cfg.dir.beta_irrational));
  }
  meta.push_back("gauge=" + to_string(cfg.gauge));
  return meta;
}

std::string compose_csv(const std::vector<std::string>& meta,
                        const std::string& columns, const std::string& rows) {
  std::string out;
  for (const std::string& line : meta) out += "# " + line + "\n";
  out += "# content_fnv1a=" + std::to_string(fnv1a(rows)) + "\n";
  out += columns + "\n";
  out += rows;
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("WriteFailed: cannot open " + tmp);
    f.write(content.data(), std::streamsize(content.size()));
    if (!f) throw IoError("WriteFailed: short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("WriteFailed: cannot rename " + tmp + " to " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("ReadFailed: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string serialize_series(const ObservableSeries& series,
                             const std::vector<std::string>& meta) {
  std::string rows;
  for (std::size_t i = 0; i < series.size(); ++i) {
    rows += format_double(series.times[i]) + "," +
            format_double(series.x_mean[i]) + "," +
            format_double(series.y_mean[i]) + "," +
            format_double(series.sigma[i]) + "," +
            format_double(std::sqrt(series.m2_eta[i])) + "," +
            format_double(series.leak[i]) + "\n";
  }
  return compose_csv(meta, "t,x_mean,y_mean,sigma,sqrt_m2_eta,leak", rows);
}

std::string serialize_profile(const EtaProfile& profile,
                              const std::vector<std::string>& meta) {
  std::vector<std::string> full = meta;
  full.push_back("bin_width=" + format_double(profile.bin_width));
  std::string rows;
  for (std::size_t i = 0; i < profile.centers.size(); ++i)
    rows += format_double(profile.centers[i]) + "," +
            format_double(profile.prob[i]) + "\n";
  return compose_csv(full, "eta,prob", rows);
}

std::string serialize_spectrum(const SpectrumResult& spectrum,
                               const std::vector<std::string>& meta) {
  std::vector<std::string> full = meta;
  full.push_back("p_min=" + std::to_string(spectrum.p_min));
  full.push_back("p_max=" + std::to_string(spectrum.p_max));
  std::string rows;
  for (std::size_t i = 0; i < spectrum.kappa_grid.size(); ++i)
    for (std::size_t b = 0; b < spectrum.energies[i].size(); ++b)
      rows += format_double(spectrum.kappa_grid[i]) + "," +
              std::to_string(b) + "," +
              format_double(spectrum.energies[i][b]) + "\n";
  return compose_csv(full, "kappa,band,energy", rows);
}

std::string serialize_line(const DiabaticLine& line,
                           const std::vector<std::string>& meta) {
  std::vector<std::string> full = meta;
  full.push_back("slope=" + format_double(line.slope));
  full.push_back("min_overlap=" + format_double(line.min_overlap));
  full.push_back("seed_kappa=" + format_double(line.seed_kappa));
  full.push_back("seed_band=" + std::to_string(line.seed_band));
  std::string rows;
  for (std::size_t j = 0; j < line.kappa_samples.size(); ++j)
    rows += format_double(line.kappa_samples[j]) + "," +
            format_double(line.energies[j]) + "\n";
  return compose_csv(full, "kappa,energy", rows);
}

std::string serialize_packet(const WavePacket& psi,
                             const std::vector<std::string>& meta) {
  std::vector<std::string> full = meta;
  full.push_back("packet_gauge=" + to_string(psi.gauge));
  full.push_back("packet_t=" + format_double(psi.t));
  full.push_back("strip_beta=" + format_double(psi.strip.beta));
  full.push_back("strip_L_half=" + std::to_string(psi.strip.L_half));
  full.push_back("strip_W_half=" + std::to_string(psi.strip.W_half));
  std::string rows;
  for (long i = 0; i < psi.amp.size(); ++i) {
    if (psi.amp[i] == std::complex<double>(0.0, 0.0)) continue;
    const SiteIndex site = psi.strip.physical(i);
    rows += std::to_string(site.l) + "," + std::to_string(site.m) + "," +
            format_double(psi.amp[i].real()) + "," +
            format_double(psi.amp[i].imag()) + "\n";
  }
  return compose_csv(full, "l,m,re,im", rows);
}

namespace {

double parse_number(const std::string& token, const std::string& what) {
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw IoError("ParseFailed: bad number '" + token + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

WavePacket parse_packet(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool have_gauge = false, have_beta = false, have_L = false, have_W = false;
  WavePacket psi;
  std::vector<std::array<double, 4>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      while (!key.empty() && key.front() == ' ') key.erase(key.begin());
      while (!key.empty() && key.back() == ' ') key.pop_back();
      const std::string value = line.substr(eq + 1);
      if (key == "packet_gauge") {
        psi.gauge = gauge_from_string(value);
        have_gauge = true;
      } else if (key == "packet_t") {
        psi.t = parse_number(value, "packet_t");
      } else if (key == "strip_beta") {
        psi.strip.beta = parse_number(value, "strip_beta");
        have_beta = true;
      } else if (key == "strip_L_half") {
        psi.strip.L_half = int(parse_number(value, "strip_L_half"));
        have_L = true;
      } else if (key == "strip_W_half") {
        psi.strip.W_half = int(parse_number(value, "strip_W_half"));
        have_W = true;
      }
      continue;
    }
    if (line.find_first_of("0123456789-") != 0) continue;  // column header
    const std::vector<std::string> t = split(line, ',');
    if (t.size() != 4) throw IoError("ParseFailed: packet row needs l,m,re,im");
    rows.push_back({parse_number(t[0], "l"), parse_number(t[1], "m"),
                    parse_number(t[2], "re"), parse_number(t[3], "im")});
  }
  if (!have_gauge || !have_beta || !have_L || !have_W)
    throw IoError("ParseFailed: packet header incomplete");
  psi.amp = Eigen::VectorXcd::Zero(psi.strip.size());
  for (const auto& r : rows) {
    const long idx = psi.strip.index_physical(long(r[0]), long(r[1]));
    if (idx < 0)
      throw IoError("ParseFailed: packet site off its own strip");
    psi.amp[idx] = std::complex<double>(r[2], r[3]);
  }
  return psi;
}

WavePacket read_packet(const std::string& path) {
  return parse_packet(read_text(path));
}

std::string serialize_fit(const FitResult& fit, const std::string& label) {
  std::string out = label + ":";
  out += " coefficient=" + format_double(fit.coefficient);
  out += " exponent=" + format_double(fit.exponent);
  out += " intercept=" + format_double(fit.intercept);
  out += " residual=" + format_double(fit.residual);
  out += " window=[" + format_double(fit.window_lo) + "," +
         format_double(fit.window_hi) + "]";
  out += " n=" + std::to_string(fit.n);
  out += "\n";
  return out;
}

}  // namespace cyclobloch
