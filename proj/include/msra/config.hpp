#pragma once
// System configuration: the single parameter block shared by every module.
//
// The on-disk format is flat `key=value` text, one pair per line, with `#`
// comments. Keys mirror the field names below. parse -> serialize -> parse is
// an identity (round-trip contract), and serialize emits a canonical key
// order so serialized configs are diff- and hash-stable.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "msra/rng.hpp"

namespace msra {

enum class Mode { NB, WB };
enum class Spreading { MSRA, SSRA };
enum class ActivityModel { Fixed, Poisson };

inline std::string to_string(Mode m) { return m == Mode::NB ? "NB" : "WB"; }
inline std::string to_string(Spreading s) {
  return s == Spreading::MSRA ? "MSRA" : "SSRA";
}
inline std::string to_string(ActivityModel a) {
  return a == ActivityModel::Fixed ? "fixed" : "poisson";
}

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct SystemConfig {
  // Air-interface geometry.
  Mode mode = Mode::WB;
  Spreading spreading = Spreading::MSRA;
  int M = 16;        // spreading-sequence length (subcarriers per symbol group)
  int N_s = 256;     // base-pool size (distinct spreading sequences)
  int N_T = 256;     // number of signatures (random-access resources)
  int N_p = 256;     // number of preambles (one-to-one with signatures)
  int N_zc = 127;    // ZC sequence length (prime)
  int tau = 3;       // channel taps / cyclic-shift spacing
  int upsilon = 32;  // sequences per signature (symbols per group)
  int N_g = 1;       // symbol groups per frame
  int N_c = 32;      // symbols per frame; invariant: N_c == upsilon * N_g
  int N_sc_d = 16;   // data-slot subcarriers
  int N_sc_p = 128;  // preamble-slot subcarriers; invariant: N_zc <= N_sc_p

  // Link conditions.
  double snr_db = 10.0;
  ActivityModel activity = ActivityModel::Fixed;
  double N_a = 12;  // fixed: active-user count; poisson: mean arrival count

  // Determinism.
  std::uint64_t master_seed = 1;

  // Receiver knobs (defaults per the documented design decisions).
  double stage1_c0 = 0.25;   // stage-1 threshold scale
  bool stage1_prune = false;  // optional greedy pruning pass after stage 1
  bool nb_single_stage = false;  // NB/tau=1: skip stage 1, hypothesize all
  std::string stop_rule = "gaussian";  // wsomp stop: "gaussian" | "plain"
  int max_outer = 8;  // outer-loop cap before the majority fallback

  // Derived quantities -------------------------------------------------------

  // Noise power per complex chip. SNR is per-user average receive SNR per
  // spread symbol: unit-energy sequences, unit-power symbols, unit average
  // channel energy spread over M chips.
  double sigma2() const { return std::pow(10.0, -snr_db / 10.0) / M; }

  // Enumeration capacity of the cyclic-shifted ZC preamble construction.
  long zc_capacity() const {
    return static_cast<long>(N_zc - 1) * (N_zc / tau);
  }

  int fixed_user_count() const { return static_cast<int>(N_a); }

  // Validation ----------------------------------------------------------------

  // Returns one message per violated invariant; empty means valid.
  std::vector<std::string> validate() const {
    std::vector<std::string> v;
    auto req = [&](bool ok, const std::string& msg) {
      if (!ok) v.push_back(msg);
    };
    req(M >= 1, "M must be >= 1");
    req(N_s >= 1, "N_s must be >= 1");
    req(N_T >= 1, "N_T must be >= 1");
    req(N_p >= 1, "N_p must be >= 1");
    req(N_p == N_T, "N_p must equal N_T (one-to-one preamble/signature map)");
    req(N_zc >= 3, "N_zc must be >= 3");
    req(tau >= 1, "tau must be >= 1");
    req(upsilon >= 1, "upsilon must be >= 1");
    req(N_g >= 1, "N_g must be >= 1");
    req(N_c == upsilon * N_g, "N_c must equal upsilon * N_g");
    req(N_zc <= N_sc_p, "N_zc must be <= N_sc_p");
    req(M <= N_sc_d, "M must be <= N_sc_d");
    if (mode == Mode::NB) {
      req(tau == 1, "NB mode forces tau = 1");
    } else {
      req(tau >= 2, "WB mode requires tau >= 2");
      req(is_prime(N_zc), "WB mode requires N_zc prime");
    }
    req(is_prime(N_zc), "N_zc must be prime for the ZC construction");
    req(static_cast<long>(N_p) <= zc_capacity(),
        "N_p exceeds ZC enumeration capacity (N_zc-1)*floor(N_zc/tau)");
    if (spreading == Spreading::MSRA)
      req(upsilon <= N_s, "MSRA requires upsilon <= N_s");
    req(N_a >= 0, "N_a must be >= 0");
    req(std::isfinite(snr_db), "snr_db must be finite");
    req(stage1_c0 > 0, "stage1_c0 must be > 0");
    req(max_outer >= 1, "max_outer must be >= 1");
    req(stop_rule == "gaussian" || stop_rule == "plain",
        "stop_rule must be 'gaussian' or 'plain'");
    return v;
  }

  bool valid() const { return validate().empty(); }

  // Serialization ---------------------------------------------------------------

  std::string serialize() const {
    std::ostringstream os;
    os << "# system config v1\n";
    os << "mode=" << to_string(mode) << "\n";
    os << "spreading=" << to_string(spreading) << "\n";
    os << "M=" << M << "\n";
    os << "N_s=" << N_s << "\n";
    os << "N_T=" << N_T << "\n";
    os << "N_p=" << N_p << "\n";
    os << "N_zc=" << N_zc << "\n";
    os << "tau=" << tau << "\n";
    os << "upsilon=" << upsilon << "\n";
    os << "N_g=" << N_g << "\n";
    os << "N_c=" << N_c << "\n";
    os << "N_sc_d=" << N_sc_d << "\n";
    os << "N_sc_p=" << N_sc_p << "\n";
    os << "snr_db=" << fmt_double(snr_db) << "\n";
    os << "activity=" << to_string(activity) << "\n";
    os << "N_a=" << fmt_double(N_a) << "\n";
    os << "master_seed=" << master_seed << "\n";
    os << "stage1_c0=" << fmt_double(stage1_c0) << "\n";
    os << "stage1_prune=" << (stage1_prune ? 1 : 0) << "\n";
    os << "nb_single_stage=" << (nb_single_stage ? 1 : 0) << "\n";
    os << "stop_rule=" << stop_rule << "\n";
    os << "max_outer=" << max_outer << "\n";
    return os.str();
  }

  static SystemConfig parse(const std::string& text) {
    SystemConfig c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const std::string kv = strip_comment(line);
      if (kv.empty()) continue;
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config parse error at line " +
                                 std::to_string(lineno) + ": expected key=value");
      const std::string key = trim(kv.substr(0, eq));
      const std::string val = trim(kv.substr(eq + 1));
      if (!c.set_key(key, val))
        throw std::runtime_error("config parse error at line " +
                                 std::to_string(lineno) + ": unknown key '" +
                                 key + "'");
    }
    return c;
  }

  // Sets a single key; returns false on unknown key, throws on a bad value.
  bool set_key(const std::string& key, const std::string& val) {
    auto to_int = [&](const std::string& s) {
      std::size_t pos = 0;
      const int x = std::stoi(s, &pos);
      if (pos != s.size()) throw std::runtime_error("bad integer '" + s + "'");
      return x;
    };
    auto to_u64 = [&](const std::string& s) {
      std::size_t pos = 0;
      const std::uint64_t x = std::stoull(s, &pos);
      if (pos != s.size()) throw std::runtime_error("bad integer '" + s + "'");
      return x;
    };
    auto to_dbl = [&](const std::string& s) {
      std::size_t pos = 0;
      const double x = std::stod(s, &pos);
      if (pos != s.size()) throw std::runtime_error("bad number '" + s + "'");
      return x;
    };
    auto to_bool = [&](const std::string& s) {
      if (s == "1" || s == "true") return true;
      if (s == "0" || s == "false") return false;
      throw std::runtime_error("bad flag '" + s + "'");
    };
    if (key == "mode") {
      if (val == "NB") mode = Mode::NB;
      else if (val == "WB") mode = Mode::WB;
      else throw std::runtime_error("mode must be NB or WB");
    } else if (key == "spreading") {
      if (val == "MSRA") spreading = Spreading::MSRA;
      else if (val == "SSRA") spreading = Spreading::SSRA;
      else throw std::runtime_error("spreading must be MSRA or SSRA");
    } else if (key == "M") M = to_int(val);
    else if (key == "N_s") N_s = to_int(val);
    else if (key == "N_T") N_T = to_int(val);
    else if (key == "N_p") N_p = to_int(val);
    else if (key == "N_zc") N_zc = to_int(val);
    else if (key == "tau") tau = to_int(val);
    else if (key == "upsilon") upsilon = to_int(val);
    else if (key == "N_g") N_g = to_int(val);
    else if (key == "N_c") N_c = to_int(val);
    else if (key == "N_sc_d") N_sc_d = to_int(val);
    else if (key == "N_sc_p") N_sc_p = to_int(val);
    else if (key == "snr_db") snr_db = to_dbl(val);
    else if (key == "activity") {
      if (val == "fixed") activity = ActivityModel::Fixed;
      else if (val == "poisson") activity = ActivityModel::Poisson;
      else throw std::runtime_error("activity must be fixed or poisson");
    } else if (key == "N_a") N_a = to_dbl(val);
    else if (key == "master_seed") master_seed = to_u64(val);
    else if (key == "stage1_c0") stage1_c0 = to_dbl(val);
    else if (key == "stage1_prune") stage1_prune = to_bool(val);
    else if (key == "nb_single_stage") nb_single_stage = to_bool(val);
    else if (key == "stop_rule") stop_rule = val;
    else if (key == "max_outer") max_outer = to_int(val);
    else return false;
    return true;
  }

  // Stable hash of the canonical serialization; used in export headers and
  // run manifests.
  std::string hash() const {
    const std::uint64_t h = hash_tag(serialize());
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
  }

 private:
  static std::string fmt_double(double x) {
    // Canonical shortest representation that round-trips; integers print bare.
    if (x == static_cast<long long>(x) && std::fabs(x) < 1e15) {
      return std::to_string(static_cast<long long>(x));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  static std::string strip_comment(const std::string& s) {
    const auto h = s.find('#');
    return trim(h == std::string::npos ? s : s.substr(0, h));
  }
  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }
};

// ---------------------------------------------------------------------------
// Named configurations
// ---------------------------------------------------------------------------
// Desk-scale configurations run in minutes on one machine; full-scale mirrors
// the published operating points (slow, provided for completeness).

namespace presets {

// Narrowband desk configuration (single-tap flat channel). Stage 1 is skipped
// in favor of the known-preamble convention valid for NB/tau=1; this keeps the
// detection statistics governed by the spreading structure rather than by the
// single-dimension preamble-energy test.
inline SystemConfig nb_desk() {
  SystemConfig c;
  c.mode = Mode::NB;
  c.spreading = Spreading::MSRA;
  c.M = 16;
  c.N_s = 128;
  c.N_T = 128;
  c.N_p = 128;
  c.N_zc = 127;
  c.tau = 1;
  c.upsilon = 16;
  c.N_g = 2;
  c.N_c = 32;
  c.N_sc_d = 16;
  c.N_sc_p = 128;
  c.snr_db = 10.0;
  c.activity = ActivityModel::Fixed;
  c.N_a = 12;
  c.nb_single_stage = true;
  return c;
}

// Wideband desk configuration for failure-rate-versus-load studies:
// three-tap channel, leaky preamble plane (N_zc = 127 on 128 subcarriers),
// one symbol group of upsilon = 32 symbols.
inline SystemConfig wb_desk_load() {
  SystemConfig c;
  c.mode = Mode::WB;
  c.spreading = Spreading::MSRA;
  c.M = 16;
  c.N_s = 256;
  c.N_T = 256;
  c.N_p = 256;
  c.N_zc = 127;
  c.tau = 3;
  c.upsilon = 32;
  c.N_g = 1;
  c.N_c = 32;
  c.N_sc_d = 16;
  c.N_sc_p = 128;
  c.snr_db = 10.0;
  c.activity = ActivityModel::Fixed;
  c.N_a = 12;
  return c;
}

// Wideband desk configuration for symbol-error studies: clean preamble plane
// (N_zc = 509 on 512 subcarriers) so channel-estimation error does not
// dominate, 16 groups of 16 symbols.
inline SystemConfig wb_desk_ser() {
  SystemConfig c;
  c.mode = Mode::WB;
  c.spreading = Spreading::MSRA;
  c.M = 16;
  c.N_s = 256;
  c.N_T = 256;
  c.N_p = 256;
  c.N_zc = 509;
  c.tau = 3;
  c.upsilon = 16;
  c.N_g = 16;
  c.N_c = 256;
  c.N_sc_d = 256;
  c.N_sc_p = 512;
  c.snr_db = 16.0;
  c.activity = ActivityModel::Fixed;
  c.N_a = 12;
  return c;
}

// Full-scale narrowband operating point.
inline SystemConfig nb_full() {
  SystemConfig c;
  c.mode = Mode::NB;
  c.spreading = Spreading::MSRA;
  c.M = 32;
  c.N_s = 1024;
  c.N_T = 1024;
  c.N_p = 1024;
  c.N_zc = 127;
  c.tau = 1;
  c.upsilon = 32;
  c.N_g = 2;
  c.N_c = 64;
  c.N_sc_d = 64;
  c.N_sc_p = 128;
  c.snr_db = 10.0;
  c.activity = ActivityModel::Fixed;
  c.N_a = 24;
  c.nb_single_stage = true;
  return c;
}

// Full-scale wideband operating point: 128 data subcarriers, 128-symbol
// frames split into 4 groups of 32, 1024 non-orthogonal preambles from
// cyclic-shifted ZC roots.
inline SystemConfig wb_full() {
  SystemConfig c;
  c.mode = Mode::WB;
  c.spreading = Spreading::MSRA;
  c.M = 32;
  c.N_s = 1024;
  c.N_T = 1024;
  c.N_p = 1024;
  c.N_zc = 127;
  c.tau = 3;
  c.upsilon = 32;
  c.N_g = 4;
  c.N_c = 128;
  c.N_sc_d = 128;
  c.N_sc_p = 128;
  c.snr_db = 10.0;
  c.activity = ActivityModel::Fixed;
  c.N_a = 24;
  return c;
}

}  // namespace presets

}  // namespace msra
