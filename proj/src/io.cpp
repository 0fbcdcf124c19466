#include "mist/io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "mist/errors.hpp"

namespace mist {

namespace {

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw format_error("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

float decode_f32le(const unsigned char* p, bool swap) {
  std::uint32_t bits;
  if (!swap) {
    bits = static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
  } else {
    bits = static_cast<std::uint32_t>(p[3]) |
           (static_cast<std::uint32_t>(p[2]) << 8) |
           (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[0]) << 24);
  }
  return std::bit_cast<float>(bits);
}

void encode_f32le(float v, unsigned char* p) {
  const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  p[0] = static_cast<unsigned char>(bits & 0xff);
  p[1] = static_cast<unsigned char>((bits >> 8) & 0xff);
  p[2] = static_cast<unsigned char>((bits >> 16) & 0xff);
  p[3] = static_cast<unsigned char>((bits >> 24) & 0xff);
}

double parse_double_token(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw format_error(where + ": cannot parse number '" + token + "'");
  }
  return value;
}

long parse_int_token(const std::string& token, const std::string& where) {
  long value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw format_error(where + ": cannot parse integer '" + token + "'");
  }
  return value;
}

/// Reads width*height little-endian (or swapped) floats starting at
/// `offset`, converting to double and validating finiteness.
std::vector<double> decode_payload(const std::string& bytes, std::size_t offset,
                                   int width, int height, bool swap,
                                   const std::string& path) {
  const std::size_t count =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t expected = count * 4;
  const std::size_t available = bytes.size() - offset;
  if (available < expected) {
    throw format_error(path + ": truncated payload at byte offset " +
                       std::to_string(offset) + ": expected " +
                       std::to_string(expected) + " bytes of pixel data, found " +
                       std::to_string(available));
  }
  if (available > expected) {
    throw format_error(path + ": trailing garbage after payload: expected " +
                       std::to_string(expected) + " bytes of pixel data, found " +
                       std::to_string(available));
  }
  std::vector<double> values(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + offset;
  for (std::size_t i = 0; i < count; ++i, p += 4) {
    const float f = decode_f32le(p, swap);
    if (!std::isfinite(f)) {
      throw format_error(path + ": non-finite pixel value at index " +
                         std::to_string(i) + " (byte offset " +
                         std::to_string(offset + 4 * i) + ")");
    }
    values[i] = static_cast<double>(f);
  }
  return values;
}

std::string header_line(const std::string& bytes, std::size_t& cursor,
                        const std::string& path) {
  const std::size_t eol = bytes.find('\n', cursor);
  if (eol == std::string::npos) {
    throw format_error(path + ": unterminated header line at byte offset " +
                       std::to_string(cursor));
  }
  std::string line = bytes.substr(cursor, eol - cursor);
  cursor = eol + 1;
  return line;
}

ScalarField read_raw(const std::string& bytes, const std::string& path,
                     std::optional<double> pitch_override) {
  std::size_t cursor = 0;
  const std::string w_line = header_line(bytes, cursor, path);
  const std::string h_line = header_line(bytes, cursor, path);
  const std::string p_line = header_line(bytes, cursor, path);
  const long width = parse_int_token(w_line, path + ": header line 1 (width)");
  const long height = parse_int_token(h_line, path + ": header line 2 (height)");
  const double pitch =
      parse_double_token(p_line, path + ": header line 3 (pitch)");
  if (width < 1 || height < 1) {
    throw format_error(path + ": header dimensions must be positive, got " +
                       std::to_string(width) + "x" + std::to_string(height));
  }
  if (!std::isfinite(pitch) || pitch <= 0.0) {
    throw format_error(path + ": header pitch must be positive, got '" +
                       p_line + "'");
  }
  std::vector<double> values =
      decode_payload(bytes, cursor, static_cast<int>(width),
                     static_cast<int>(height), /*swap=*/false, path);
  return ScalarField(static_cast<int>(width), static_cast<int>(height),
                     pitch_override.value_or(pitch), std::move(values));
}

bool is_pfm_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::string pfm_token(const std::string& bytes, std::size_t& cursor,
                      const std::string& path) {
  while (cursor < bytes.size() && is_pfm_space(bytes[cursor])) ++cursor;
  const std::size_t start = cursor;
  while (cursor < bytes.size() && !is_pfm_space(bytes[cursor])) ++cursor;
  if (start == cursor) {
    throw format_error(path + ": unexpected end of pfm header at byte offset " +
                       std::to_string(cursor));
  }
  return bytes.substr(start, cursor - start);
}

ScalarField read_pfm(const std::string& bytes, const std::string& path,
                     std::optional<double> pitch_override) {
  std::size_t cursor = 0;
  const std::string magic = pfm_token(bytes, cursor, path);
  if (magic == "PF") {
    throw format_error(path + ": color 'PF' maps are not supported, "
                              "expected grayscale 'Pf'");
  }
  if (magic != "Pf") {
    throw format_error(path + ": bad magic '" + magic + "', expected 'Pf'");
  }
  const long width =
      parse_int_token(pfm_token(bytes, cursor, path), path + ": pfm width");
  const long height =
      parse_int_token(pfm_token(bytes, cursor, path), path + ": pfm height");
  const double scale =
      parse_double_token(pfm_token(bytes, cursor, path), path + ": pfm scale");
  if (width < 1 || height < 1) {
    throw format_error(path + ": pfm dimensions must be positive");
  }
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw format_error(path + ": pfm scale must be finite and non-zero");
  }
  if (cursor >= bytes.size() || !is_pfm_space(bytes[cursor])) {
    throw format_error(path + ": missing whitespace before pfm payload at "
                              "byte offset " + std::to_string(cursor));
  }
  ++cursor;  // exactly one whitespace byte separates header and payload

  // Negative scale marks little-endian data.
  std::vector<double> rows = decode_payload(bytes, cursor, static_cast<int>(width),
                                            static_cast<int>(height),
                                            /*swap=*/scale > 0.0, path);
  // PFM scanlines run bottom-to-top; normalize to top-down.
  std::vector<double> values(rows.size());
  for (long y = 0; y < height; ++y) {
    const std::size_t src = static_cast<std::size_t>(height - 1 - y) *
                            static_cast<std::size_t>(width);
    const std::size_t dst =
        static_cast<std::size_t>(y) * static_cast<std::size_t>(width);
    for (long x = 0; x < width; ++x) values[dst + x] = rows[src + x];
  }
  return ScalarField(static_cast<int>(width), static_cast<int>(height),
                     pitch_override.value_or(1.0), std::move(values));
}

}  // namespace

FieldFormat format_from_extension(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pfm") return FieldFormat::pfm;
  if (ext == ".raw") return FieldFormat::raw;
  throw std::invalid_argument("cannot infer field format from extension '" +
                              ext + "' (expected .raw or .pfm)");
}

ScalarField read_field(const FieldFile& file,
                       std::optional<double> pitch_override) {
  const std::string bytes = read_file_bytes(file.path);
  const std::string name = file.path.string();
  return file.format == FieldFormat::raw
             ? read_raw(bytes, name, pitch_override)
             : read_pfm(bytes, name, pitch_override);
}

void write_field(const ScalarField& field, const FieldFile& file) {
  const std::size_t count = field.size();
  std::string payload(count * 4, '\0');
  auto* out = reinterpret_cast<unsigned char*>(payload.data());

  auto encode_value = [&](double v, unsigned char* dst) {
    const float f = static_cast<float>(v);
    if (!std::isfinite(f)) {
      throw format_error(file.path.string() +
                         ": value not representable as float32: " +
                         std::to_string(v));
    }
    encode_f32le(f, dst);
  };

  std::ostringstream header;
  if (file.format == FieldFormat::raw) {
    header.precision(17);
    header << field.width() << "\n" << field.height() << "\n"
           << field.pitch() << "\n";
    for (std::size_t i = 0; i < count; ++i) {
      encode_value(field.values()[i], out + 4 * i);
    }
  } else {
    header << "Pf\n" << field.width() << " " << field.height() << "\n-1.0\n";
    std::size_t dst = 0;
    for (int y = field.height() - 1; y >= 0; --y) {
      for (int x = 0; x < field.width(); ++x, ++dst) {
        encode_value(field(x, y), out + 4 * dst);
      }
    }
  }

  std::ofstream f(file.path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw format_error("cannot open file for writing: " + file.path.string());
  }
  const std::string head = std::move(header).str();
  f.write(head.data(), static_cast<std::streamsize>(head.size()));
  f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!f) {
    throw format_error("write failed: " + file.path.string());
  }
}

StencilKind parse_stencil_kind(const std::string& text) {
  if (text == "five_point_fd" || text == "fd") return StencilKind::five_point_fd;
  if (text == "spectral_fourier" || text == "spectral") {
    return StencilKind::spectral_fourier;
  }
  throw std::invalid_argument("unknown stencil kind '" + text +
                              "' (expected five_point_fd or spectral_fourier)");
}

BoundaryRule parse_boundary(const std::string& text) {
  if (text == "mirror") return BoundaryRule::mirror;
  if (text == "periodic") return BoundaryRule::periodic;
  throw std::invalid_argument("unknown boundary rule '" + text +
                              "' (expected mirror or periodic)");
}

std::string to_string(StencilKind kind) {
  return kind == StencilKind::five_point_fd ? "five_point_fd"
                                            : "spectral_fourier";
}

std::string to_string(BoundaryRule boundary) {
  return boundary == BoundaryRule::mirror ? "mirror" : "periodic";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw format_error("cannot open config: " + path.string());
  }
  const std::filesystem::path base = path.parent_path();

  RunConfig cfg;
  std::optional<std::string> scheme_kind, scheme_boundary;
  std::vector<std::string> seen;
  bool have_delta = false, have_energy = false, have_pitch = false,
       have_outdir = false, have_epsilon = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw format_error(where + ": expected 'key = value', got '" + stripped +
                         "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw format_error(where + ": empty key or value");
    }

    if (key != "pair") {  // pair is the only repeatable key
      for (const std::string& s : seen) {
        if (s == key) {
          throw format_error(where + ": duplicate key '" + key +
                             "' (values must be stated once)");
        }
      }
      seen.push_back(key);
    }

    if (key == "delta_m") {
      cfg.delta_m = parse_double_token(value, where);
      have_delta = true;
    } else if (key == "energy_ev") {
      cfg.energy_ev = parse_double_token(value, where);
      have_energy = true;
    } else if (key == "pitch_m") {
      cfg.pitch_m = parse_double_token(value, where);
      have_pitch = true;
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double_token(value, where);
      have_epsilon = true;
      if (cfg.epsilon < 0.0) {
        throw format_error(where + ": epsilon must be >= 0");
      }
    } else if (key == "scheme") {
      scheme_kind = value;
    } else if (key == "boundary") {
      scheme_boundary = value;
    } else if (key == "output_dir") {
      cfg.output_dir = base / value;
      have_outdir = true;
    } else if (key == "pair") {
      std::istringstream ps(value);
      std::string ref, sam, extra;
      if (!(ps >> ref >> sam) || (ps >> extra)) {
        throw format_error(where +
                           ": pair expects '<reference_path> <sample_path>'");
      }
      cfg.pairs.emplace_back(base / ref, base / sam);
    } else {
      throw format_error(where + ": unknown key '" + key + "'");
    }
  }
  (void)have_epsilon;

  if (!have_delta) throw format_error(path.string() + ": missing key 'delta_m'");
  if (!have_energy) {
    throw format_error(path.string() + ": missing key 'energy_ev'");
  }
  if (!have_pitch) throw format_error(path.string() + ": missing key 'pitch_m'");
  if (!have_outdir) {
    throw format_error(path.string() + ": missing key 'output_dir'");
  }
  if (cfg.pairs.empty()) {
    throw format_error(path.string() + ": at least one 'pair' entry is required");
  }

  try {
    const StencilKind kind = scheme_kind ? parse_stencil_kind(*scheme_kind)
                                         : StencilKind::five_point_fd;
    const BoundaryRule boundary = scheme_boundary
                                      ? parse_boundary(*scheme_boundary)
                                      : (kind == StencilKind::spectral_fourier
                                             ? BoundaryRule::periodic
                                             : BoundaryRule::mirror);
    cfg.scheme = StencilScheme(kind, boundary);
  } catch (const std::invalid_argument& e) {
    throw format_error(path.string() + ": " + e.what());
  }

  for (const auto& [ref, sam] : cfg.pairs) {
    if (!std::filesystem::exists(ref)) {
      throw format_error(path.string() + ": pair reference does not exist: " +
                         ref.string());
    }
    if (!std::filesystem::exists(sam)) {
      throw format_error(path.string() + ": pair sample does not exist: " +
                         sam.string());
    }
  }
  return cfg;
}

}  // namespace mist
