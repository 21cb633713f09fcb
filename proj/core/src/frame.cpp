#include "aad/frame.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aad {
namespace {

struct TokenReader {
  std::span<const unsigned char> bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }

  // Whitespace and '#'-to-end-of-line comments separate tokens.
  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      unsigned char c = bytes[pos];
      if (std::isspace(c)) {
        ++pos;
      } else if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  std::string next_token() {
    skip_space_and_comments();
    std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') ++pos;
    return std::string(bytes.begin() + start, bytes.begin() + pos);
  }

  long next_uint(const char* what) {
    std::string tok = next_token();
    if (tok.empty()) throw FormatError(std::string("pgm: missing ") + what);
    long value = 0;
    for (char c : tok) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw FormatError(std::string("pgm: invalid ") + what + " '" + tok + "'");
      value = value * 10 + (c - '0');
      if (value > 1000000000L) throw FormatError(std::string("pgm: ") + what + " out of range");
    }
    return value;
  }
};

}  // namespace

FrameBuffer decode_pgm(std::span<const unsigned char> bytes) {
  TokenReader rd{bytes};
  std::string magic = rd.next_token();
  bool binary;
  if (magic == "P5") {
    binary = true;
  } else if (magic == "P2") {
    binary = false;
  } else {
    throw FormatError("pgm: bad magic '" + magic + "'");
  }

  long width = rd.next_uint("width");
  long height = rd.next_uint("height");
  long maxval = rd.next_uint("maxval");
  if (width < 1 || height < 1)
    throw FormatError("pgm: degenerate dimensions " + std::to_string(width) + "x" +
                      std::to_string(height));
  if (maxval < 1 || maxval > 65535)
    throw FormatError("pgm: maxval " + std::to_string(maxval) + " out of range");
  if (width * height > 100'000'000L) throw FormatError("pgm: implausible image size");

  FrameBuffer frame(static_cast<int>(width), static_cast<int>(height));
  const float scale = 255.0f / static_cast<float>(maxval);
  const std::size_t n = frame.pixel_count();

  if (binary) {
    // Exactly one whitespace byte after maxval, then raw samples.
    if (rd.eof() || !std::isspace(rd.bytes[rd.pos]))
      throw FormatError("pgm: missing separator after maxval");
    ++rd.pos;
    const std::size_t sample_size = maxval > 255 ? 2 : 1;
    if (bytes.size() - rd.pos < n * sample_size)
      throw FormatError("pgm: truncated payload, need " + std::to_string(n * sample_size) +
                        " bytes, have " + std::to_string(bytes.size() - rd.pos));
    const unsigned char* p = bytes.data() + rd.pos;
    for (std::size_t i = 0; i < n; ++i) {
      unsigned value;
      if (sample_size == 2) {
        value = (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];  // big-endian
      } else {
        value = p[i];
      }
      if (value > static_cast<unsigned>(maxval))
        throw FormatError("pgm: sample " + std::to_string(value) + " exceeds maxval");
      frame.data[i] = static_cast<float>(value) * scale;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      long value = rd.next_uint("sample");
      if (value > maxval)
        throw FormatError("pgm: sample " + std::to_string(value) + " exceeds maxval");
      frame.data[i] = static_cast<float>(value) * scale;
    }
  }
  return frame;
}

std::vector<unsigned char> encode_pgm(const FrameBuffer& frame) {
  std::string header = "P5\n" + std::to_string(frame.width) + " " +
                       std::to_string(frame.height) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.reserve(out.size() + frame.pixel_count());
  for (float v : frame.data) {
    float clamped = std::clamp(v, 0.0f, 255.0f);
    out.push_back(static_cast<unsigned char>(std::lround(clamped)));
  }
  return out;
}

FrameBuffer load_pgm(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return decode_pgm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

void save_pgm(const FrameBuffer& frame, const std::filesystem::path& file) {
  std::vector<unsigned char> bytes = encode_pgm(frame);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

FrameBuffer to_grayscale(int width, int height, std::span<const float> r,
                         std::span<const float> g, std::span<const float> b) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (r.size() != n || g.size() != n || b.size() != n)
    throw ShapeError("to_grayscale: channel sizes do not match " + std::to_string(width) +
                     "x" + std::to_string(height));
  FrameBuffer frame(width, height);
  for (std::size_t i = 0; i < n; ++i)
    frame.data[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
  return frame;
}

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    unsigned char ca = a[i], cb = b[j];
    if (std::isdigit(ca) && std::isdigit(cb)) {
      std::size_t i0 = i, j0 = j;
      while (i < a.size() && std::isdigit(static_cast<unsigned char>(a[i]))) ++i;
      while (j < b.size() && std::isdigit(static_cast<unsigned char>(b[j]))) ++j;
      // Compare numerically: skip leading zeros, then by length, then digits.
      std::size_t ia = i0, jb = j0;
      while (ia < i && a[ia] == '0') ++ia;
      while (jb < j && b[jb] == '0') ++jb;
      std::size_t la = i - ia, lb = j - jb;
      if (la != lb) return la < lb;
      int cmp = a.compare(ia, la, b, jb, lb);
      if (cmp != 0) return cmp < 0;
    } else {
      if (ca != cb) return ca < cb;
      ++i;
      ++j;
    }
  }
  if (i >= a.size() && j >= b.size()) return a < b;  // numeric tie (e.g. "f01" vs "f1")
  return i >= a.size();                              // shorter prefix first
}

bool glob_match(const std::string& pattern, const std::string& name) {
  std::size_t p = 0, n = 0;
  std::size_t star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

FrameBuffer FrameSequence::load(int index) const {
  FrameBuffer frame = load_pgm(files_.at(index));
  frame.index = index;
  return frame;
}

FrameSequence load_sequence(const std::filesystem::path& directory,
                            const std::string& pattern) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory))
    throw IoError("load_sequence: not a directory: " + directory.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    if (glob_match(pattern, entry.path().filename().string()))
      files.push_back(entry.path());
  }
  if (files.size() < 3)
    throw StateError("load_sequence: need at least 3 frames matching '" + pattern +
                     "' in " + directory.string() + ", found " +
                     std::to_string(files.size()));

  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return natural_less(a.filename().string(), b.filename().string());
  });

  FrameSequence seq;
  seq.files_ = std::move(files);
  for (std::size_t i = 0; i < seq.files_.size(); ++i) {
    FrameBuffer probe = load_pgm(seq.files_[i]);
    if (i == 0) {
      seq.width_ = probe.width;
      seq.height_ = probe.height;
    } else if (probe.width != seq.width_ || probe.height != seq.height_) {
      throw ShapeError("load_sequence: mixed dimensions: " + seq.files_[0].string() +
                       " is " + std::to_string(seq.width_) + "x" + std::to_string(seq.height_) +
                       " but " + seq.files_[i].string() + " is " +
                       std::to_string(probe.width) + "x" + std::to_string(probe.height));
    }
  }
  return seq;
}

}  // namespace aad
