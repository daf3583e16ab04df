#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "error.hpp"
#include "streaming.hpp"
#include "synth.hpp"

namespace stereocut {

// Plain `key = value` text, one pair per line, `#` starts a comment.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::pair<std::string, std::string> split_pair(std::string_view line,
                                                      std::string_view where) {
  const auto eq = line.find('=');
  const auto key = eq == std::string_view::npos ? std::string_view{} : trim(line.substr(0, eq));
  if (key.empty()) {
    throw Error(ErrorCode::BadValue,
                std::string(where) + ": expected `key = value`, got `" + std::string(line) + "`");
  }
  return {std::string(key), std::string(trim(line.substr(eq + 1)))};
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline KeyValues parse_key_values(std::string_view text, std::string_view source = "config") {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    out.push_back(detail::split_pair(line, std::string(source) + ":" + std::to_string(line_no)));
  }
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Typed value parsers; each names the key and the accepted range on failure.
namespace parse {

[[noreturn]] inline void bad(std::string_view key, std::string_view value,
                             std::string_view accepted) {
  throw Error(ErrorCode::BadValue, "`" + std::string(key) + " = " + std::string(value) +
                                       "`: expected " + std::string(accepted));
}

inline double real(std::string_view key, std::string_view value, double lo, double hi,
                   bool lo_open, bool hi_open, std::string_view accepted) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v) ||
      (lo_open ? v <= lo : v < lo) || (hi_open ? v >= hi : v > hi)) {
    bad(key, value, accepted);
  }
  return v;
}

inline long long integer(std::string_view key, std::string_view value, long long lo,
                         long long hi, std::string_view accepted) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || v < lo || v > hi) {
    bad(key, value, accepted);
  }
  return v;
}

inline bool boolean(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad(key, value, "true or false");
}

inline std::vector<std::string_view> split_commas(std::string_view value) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto c = value.find(',');
    parts.push_back(detail::trim(value.substr(0, c)));
    if (c == std::string_view::npos) break;
    value = value.substr(c + 1);
  }
  return parts;
}

inline Rgb color(std::string_view key, std::string_view value) {
  const auto parts = split_commas(value);
  if (parts.size() != 3) bad(key, value, "r,g,b with each channel in [0, 255]");
  auto ch = [&](std::string_view p) {
    return static_cast<std::uint8_t>(integer(key, p, 0, 255, "r,g,b with each channel in [0, 255]"));
  };
  return {ch(parts[0]), ch(parts[1]), ch(parts[2])};
}

}  // namespace parse

// Field table shared by parsing and echo.
template <typename T>
struct Field {
  std::string_view key;
  std::function<void(T&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const T&)> get;
};

template <typename T>
inline void apply(const std::vector<Field<T>>& fields, T& target, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    bool known = false;
    for (const auto& f : fields) {
      if (f.key != key) continue;
      f.set(target, key, value);
      known = true;
      break;
    }
    if (!known) throw Error(ErrorCode::UnknownKey, "unknown key `" + key + "`");
  }
}

template <typename T>
inline std::string echo(const std::vector<Field<T>>& fields, const T& target) {
  std::string out;
  for (const auto& f : fields) {
    out += std::string(f.key) + " = " + f.get(target) + "\n";
  }
  return out;
}

struct Config {
  SegmentationParams seg;
  std::string frames = "frames";
  std::string disparity = "disparity";
  std::string output = "masks";
  std::string overlay;   // empty: no overlays
  std::string dump_dir;  // empty: no grid/graph dumps
  int boundary_tol = 2;
};

inline const std::vector<Field<Config>>& config_fields() {
  using parse::integer;
  using parse::real;
  using F = Field<Config>;
  auto str = [](std::string Config::*member) {
    return F{{},
             [member](Config& c, std::string_view, std::string_view v) { c.*member = v; },
             [member](const Config& c) { return c.*member; }};
  };
  auto named = [](F f, std::string_view key) {
    f.key = key;
    return f;
  };
  auto grid = [](int axis_index, std::initializer_list<int> axes) {
    std::vector<int> targets(axes);
    return F{{},
             [targets](Config& c, std::string_view k, std::string_view v) {
               const int n = static_cast<int>(
                   integer(k, v, 1, kMaxGridSize, "an integer in [1, 511]"));
               for (int a : targets) c.seg.grid_dims[a] = n;
             },
             [axis_index](const Config& c) { return std::to_string(c.seg.grid_dims[axis_index]); }};
  };
  auto lambda = [](double GraphParams::*member) {
    return F{{},
             [member](Config& c, std::string_view k, std::string_view v) {
               c.seg.graph.*member = real(k, v, 0.0, 1e300, false, false, "a real >= 0");
             },
             [member](const Config& c) { return detail::format_double(c.seg.graph.*member); }};
  };

  static const std::vector<F> fields = {
      named(str(&Config::frames), "frames"),
      named(str(&Config::disparity), "disparity"),
      named(str(&Config::output), "output"),
      named(str(&Config::overlay), "overlay"),
      named(str(&Config::dump_dir), "dump_dir"),
      {"l",
       [](Config& c, std::string_view k, std::string_view v) {
         c.seg.l = static_cast<std::size_t>(integer(k, v, 1, 1'000'000, "an integer >= 1"));
       },
       [](const Config& c) { return std::to_string(c.seg.l); }},
      named(grid(axis::Y, {axis::Y}), "grid_intensity"),
      named(grid(axis::U, {axis::U, axis::V}), "grid_chroma"),
      named(grid(axis::X, {axis::X, axis::Row}), "grid_spatial"),
      named(grid(axis::T, {axis::T}), "grid_temporal"),
      named(grid(axis::D, {axis::D}), "grid_disparity"),
      named(lambda(&GraphParams::lambda), "lambda"),
      named(lambda(&GraphParams::lambda_i), "lambda_i"),
      named(lambda(&GraphParams::lambda_d), "lambda_d"),
      {"sigma",
       [](Config& c, std::string_view k, std::string_view v) {
         const auto parts = parse::split_commas(v);
         if (parts.size() != 1 && parts.size() != kGridDims) {
           parse::bad(k, v, "one real > 0 or seven comma-separated reals > 0");
         }
         for (int a = 0; a < kGridDims; ++a) {
           c.seg.graph.sigma[a] = real(k, parts[parts.size() == 1 ? 0 : a], 0.0, 1e300, true,
                                       false, "reals > 0");
         }
       },
       [](const Config& c) {
         std::string s;
         for (int a = 0; a < kGridDims; ++a) {
           if (a) s += ",";
           s += detail::format_double(c.seg.graph.sigma[a]);
         }
         return s;
       }},
      {"tau",
       [](Config& c, std::string_view k, std::string_view v) {
         c.seg.tau = real(k, v, 0.0, 1.0, true, true, "a real in (0, 1)");
       },
       [](const Config& c) { return detail::format_double(c.seg.tau); }},
      {"nth1_divisor",
       [](Config& c, std::string_view k, std::string_view v) {
         c.seg.prior.nth1_divisor =
             static_cast<std::size_t>(integer(k, v, 1, 1'000'000'000, "an integer >= 1"));
       },
       [](const Config& c) { return std::to_string(c.seg.prior.nth1_divisor); }},
      {"nth2_divisor",
       [](Config& c, std::string_view k, std::string_view v) {
         c.seg.prior.nth2_divisor =
             static_cast<std::size_t>(integer(k, v, 1, 1'000'000'000, "an integer >= 1"));
       },
       [](const Config& c) { return std::to_string(c.seg.prior.nth2_divisor); }},
      {"peak_rule",
       [](Config& c, std::string_view k, std::string_view v) {
         if (v == "nearest") {
           c.seg.prior.peak_rule = PeakRule::Nearest;
         } else if (v == "most_frequent") {
           c.seg.prior.peak_rule = PeakRule::MostFrequent;
         } else {
           parse::bad(k, v, "nearest or most_frequent");
         }
       },
       [](const Config& c) {
         return std::string(c.seg.prior.peak_rule == PeakRule::Nearest ? "nearest"
                                                                       : "most_frequent");
       }},
      {"roi_margin",
       [](Config& c, std::string_view k, std::string_view v) {
         c.seg.roi_margin = static_cast<int>(integer(k, v, 0, 1'000'000, "an integer >= 0"));
       },
       [](const Config& c) { return std::to_string(c.seg.roi_margin); }},
      {"prior_mode",
       [](Config& c, std::string_view k, std::string_view v) {
         if (v == "window") {
           c.seg.prior_mode = PriorMode::Window;
         } else if (v == "frozen") {
           c.seg.prior_mode = PriorMode::Frozen;
         } else if (v == "frame") {
           c.seg.prior_mode = PriorMode::Frame;
         } else {
           parse::bad(k, v, "window, frozen or frame");
         }
       },
       [](const Config& c) {
         switch (c.seg.prior_mode) {
           case PriorMode::Frozen: return std::string("frozen");
           case PriorMode::Frame: return std::string("frame");
           default: return std::string("window");
         }
       }},
      {"invalid_d",
       [](Config& c, std::string_view k, std::string_view v) {
         if (v == "zero") {
           c.seg.invalid_d = InvalidDisparity::Zero;
         } else if (v == "nearest_valid") {
           c.seg.invalid_d = InvalidDisparity::NearestValid;
         } else {
           parse::bad(k, v, "zero or nearest_valid");
         }
       },
       [](const Config& c) {
         return std::string(c.seg.invalid_d == InvalidDisparity::Zero ? "zero" : "nearest_valid");
       }},
      {"literal_eq9",
       [](Config& c, std::string_view k, std::string_view v) {
         c.seg.graph.literal_eq9 = parse::boolean(k, v);
       },
       [](const Config& c) { return std::string(c.seg.graph.literal_eq9 ? "true" : "false"); }},
      {"boundary_tol",
       [](Config& c, std::string_view k, std::string_view v) {
         c.boundary_tol = static_cast<int>(integer(k, v, 0, 1'000'000, "an integer >= 0"));
       },
       [](const Config& c) { return std::to_string(c.boundary_tol); }},
      {"threads",
       [](Config& c, std::string_view k, std::string_view v) {
         c.seg.threads = static_cast<unsigned>(integer(k, v, 1, 1024, "an integer in [1, 1024]"));
       },
       [](const Config& c) { return std::to_string(c.seg.threads); }},
  };
  return fields;
}

// Defaults, then the file's pairs, then command-line `key=value` overrides.
inline Config parse_config(std::string_view file_text, const std::vector<std::string>& overrides) {
  Config cfg;
  apply(config_fields(), cfg, parse_key_values(file_text));
  KeyValues cli;
  for (const auto& o : overrides) cli.push_back(detail::split_pair(o, "override"));
  apply(config_fields(), cfg, cli);
  return cfg;
}

inline std::string echo_config(const Config& cfg) { return echo(config_fields(), cfg); }

inline const std::vector<Field<SceneSpec>>& scene_fields() {
  using parse::integer;
  using parse::real;
  using F = Field<SceneSpec>;
  auto real_field = [](std::string_view key, double SceneSpec::*member, double lo, bool lo_open,
                       std::string_view accepted) {
    return F{key,
             [=](SceneSpec& s, std::string_view k, std::string_view v) {
               s.*member = real(k, v, lo, 1e300, lo_open, false, accepted);
             },
             [=](const SceneSpec& s) { return detail::format_double(s.*member); }};
  };
  auto int_field = [](std::string_view key, int SceneSpec::*member, long long lo,
                      std::string_view accepted) {
    return F{key,
             [=](SceneSpec& s, std::string_view k, std::string_view v) {
               s.*member = static_cast<int>(integer(k, v, lo, 1'000'000, accepted));
             },
             [=](const SceneSpec& s) { return std::to_string(s.*member); }};
  };
  auto color_field = [](std::string_view key, Rgb SceneSpec::*member) {
    return F{key,
             [=](SceneSpec& s, std::string_view k, std::string_view v) {
               s.*member = parse::color(k, v);
             },
             [=](const SceneSpec& s) {
               const Rgb c = s.*member;
               return std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b);
             }};
  };
  constexpr double lowest = -1e300;
  static const std::vector<F> fields = {
      int_field("width", &SceneSpec::width, 1, "an integer >= 1"),
      int_field("height", &SceneSpec::height, 1, "an integer >= 1"),
      int_field("n_frames", &SceneSpec::n_frames, 1, "an integer >= 1"),
      {"shape",
       [](SceneSpec& s, std::string_view k, std::string_view v) {
         if (v == "ellipse") {
           s.shape = ShapeKind::Ellipse;
         } else if (v == "rectangle") {
           s.shape = ShapeKind::Rectangle;
         } else {
           parse::bad(k, v, "ellipse or rectangle");
         }
       },
       [](const SceneSpec& s) {
         return std::string(s.shape == ShapeKind::Ellipse ? "ellipse" : "rectangle");
       }},
      real_field("center_x", &SceneSpec::center_x, lowest, false, "a real"),
      real_field("center_y", &SceneSpec::center_y, lowest, false, "a real"),
      real_field("radius_x", &SceneSpec::radius_x, 0.0, true, "a real > 0"),
      real_field("radius_y", &SceneSpec::radius_y, 0.0, true, "a real > 0"),
      real_field("velocity_x", &SceneSpec::velocity_x, lowest, false, "a real"),
      real_field("velocity_y", &SceneSpec::velocity_y, lowest, false, "a real"),
      real_field("fg_disparity", &SceneSpec::fg_disparity, 0.0, false, "a real >= 0"),
      real_field("fg_jitter", &SceneSpec::fg_jitter, 0.0, false, "a real >= 0"),
      real_field("bg_disparity", &SceneSpec::bg_disparity, 0.0, false, "a real >= 0"),
      real_field("bg_jitter", &SceneSpec::bg_jitter, 0.0, false, "a real >= 0"),
      color_field("fg_color", &SceneSpec::fg_color),
      color_field("bg_color", &SceneSpec::bg_color),
      int_field("fg_noise", &SceneSpec::fg_noise, 0, "an integer >= 0"),
      int_field("bg_noise", &SceneSpec::bg_noise, 0, "an integer >= 0"),
      {"invalid_fraction",
       [](SceneSpec& s, std::string_view k, std::string_view v) {
         s.invalid_fraction = real(k, v, 0.0, 1.0, false, false, "a real in [0, 1]");
       },
       [](const SceneSpec& s) { return detail::format_double(s.invalid_fraction); }},
      {"seed",
       [](SceneSpec& s, std::string_view k, std::string_view v) {
         std::uint64_t seed = 0;
         auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
         if (ec != std::errc{} || ptr != v.data() + v.size()) {
           parse::bad(k, v, "an unsigned 64-bit integer");
         }
         s.seed = seed;
       },
       [](const SceneSpec& s) { return std::to_string(s.seed); }},
  };
  return fields;
}

inline SceneSpec parse_scene_spec(std::string_view text) {
  SceneSpec spec;
  apply(scene_fields(), spec, parse_key_values(text, "spec"));
  return spec;
}

inline std::string echo_scene_spec(const SceneSpec& spec) { return echo(scene_fields(), spec); }

}  // namespace stereocut
