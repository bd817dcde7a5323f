// Serialization invariants and the experiment runner's contract.

#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "cyclobloch/io.hpp"
#include "cyclobloch/model.hpp"
#include "cyclobloch/run.hpp"
#include "cyclobloch/strip.hpp"

using namespace cyclobloch;
namespace fs = std::filesystem;

namespace {

std::string msg_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("cyclobloch_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("fnv1a frozen values") {
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(fnv1a("abc") == 16654208175385433931ULL);
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, -2.5e300, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("csv composition embeds a content checksum") {
  const std::string text =
      compose_csv({"alpha=0.1"}, "x,y", "1,2\n3,4.5\n");
  CHECK(text.find("# alpha=0.1\n") != std::string::npos);
  CHECK(text.find("# content_fnv1a=") != std::string::npos);
  CHECK(text.find("x,y\n") != std::string::npos);
  CHECK(text.find("3,4.5\n") != std::string::npos);
}

TEST_CASE("packet files round-trip bit-exactly") {
  ModelConfig cfg;
  cfg.F = 0.3;
  cfg.alpha = 0.1;
  cfg.dir = Direction::make_rational(1, 2);
  cfg = validate(cfg);
  const StripLattice strip = make_strip(cfg, 5, 4);
  WavePacket psi = gaussian_packet(strip, 0.2, 0.3, true, 17);
  psi.t = 2.75;
  const std::string text = serialize_packet(psi, config_header(cfg));
  const WavePacket back = parse_packet(text);
  CHECK(back.strip.L_half == 5);
  CHECK(back.strip.W_half == 4);
  CHECK(back.gauge == psi.gauge);
  CHECK(back.t == psi.t);
  REQUIRE(back.amp.size() == psi.amp.size());
  CHECK((back.amp - psi.amp).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("atomic text files round-trip") {
  const fs::path dir = fresh_dir("io");
  const std::string path = (dir / "probe.txt").string();
  write_text_atomic(path, "line one\nline two\n");
  CHECK(read_text(path) == "line one\nline two\n");
  CHECK_THROWS_AS(read_text((dir / "absent.txt").string()), IoError);
}

TEST_CASE("config parsing rejects malformed experiments") {
  CHECK(msg_of([] { parse_config("F=0.3\nbogus=1\n", "spectrum"); })
            .find("UnknownKey") != std::string::npos);
  CHECK(msg_of([] { parse_config("F=abc\n", "spectrum"); })
            .find("TypeError") != std::string::npos);
  CHECK(msg_of([] { parse_config("alpha=0.1\n", "spectrum"); })
            .find("MissingRequired") != std::string::npos);
  CHECK(msg_of([] { parse_config("F=0.3\nbeta=0.5\nr=1\nq=2\n", "spectrum"); })
            .find("TypeError") != std::string::npos);
  CHECK(msg_of([] { parse_config("F=0.3\n", "portrait"); })
            .find("UnknownSubcommand") != std::string::npos);
  CHECK_THROWS_AS(parse_config("F=0.3\nkappa_points=1\n", "spectrum"),
                  SpecError);
  CHECK_THROWS_AS(parse_config("F=0.3\nscheme=verlet\n", "evolve"),
                  SpecError);
  CHECK_THROWS_AS(parse_config("F=0.3\ninit=file\n", "evolve"), SpecError);
  // comments and defaults parse cleanly
  const ExperimentSpec spec =
      parse_config("# probe\nF=0.5\nr=1\nq=2\nalpha=0.2\n", "spectrum");
  CHECK(spec.config.F == 0.5);
  CHECK(spec.config.alpha == 0.2);
  CHECK(spec.params.kappa_points == 256);
}

TEST_CASE("spectrum runs are byte-identical across reruns") {
  const std::string conf = "F=1.0\nr=1\nq=1\nalpha=0.1\nkappa_points=17\n"
                           "window=20\n";
  const ExperimentSpec spec = parse_config(conf, "spectrum");
  const fs::path d1 = fresh_dir("spec1");
  const fs::path d2 = fresh_dir("spec2");
  run(spec, d1.string(), 1);
  run(spec, d2.string(), 1);
  const std::string a = read_text((d1 / "spectrum.csv").string());
  const std::string b = read_text((d2 / "spectrum.csv").string());
  CHECK(a == b);
  CHECK(a.find("# content_fnv1a=") != std::string::npos);
  CHECK(a.find("# subcommand=spectrum") != std::string::npos);
}

TEST_CASE("evolve runs are byte-identical and leak-checked") {
  const std::string conf =
      "F=0.5\nr=0\nq=1\nalpha=0.1\nt_end=2\nrecord_dt=1\nstrip_L=14\n"
      "strip_W=14\nCx=0.3\nCy=0.3\nscheme=static\ninit=gaussian\n";
  const ExperimentSpec spec = parse_config(conf, "evolve");
  const fs::path d1 = fresh_dir("ev1");
  const fs::path d2 = fresh_dir("ev2");
  run(spec, d1.string(), 1);
  run(spec, d2.string(), 1);
  for (const char* name : {"series.csv", "profile.csv", "final_state.csv"}) {
    const std::string a = read_text((d1 / name).string());
    CHECK(a == read_text((d2 / name).string()));
    CHECK(!a.empty());
  }
}
