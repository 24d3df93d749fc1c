#include "infosal/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "infosal/errors.hpp"

namespace infosal {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error reading " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing " + path.string());
}

namespace {

FormatError byte_error(const std::string& what, std::size_t offset) {
    return FormatError(what + " at byte " + std::to_string(offset), FormatError::Unit::byte,
                       offset);
}

FormatError line_error(const std::string& what, std::size_t line) {
    return FormatError(what + " on line " + std::to_string(line), FormatError::Unit::line, line);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

struct PnmHeader {
    char kind = '5';
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t payload_offset = 0;
};

// Reads one unsigned decimal header field, skipping whitespace and comments.
std::size_t header_number(std::string_view bytes, std::size_t& pos, const char* field) {
    while (pos < bytes.size()) {
        if (is_space(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), value);
    if (ec != std::errc{} || ptr == bytes.data() + pos) {
        throw byte_error(std::string("expected ") + field + " in PNM header", start);
    }
    pos = static_cast<std::size_t>(ptr - bytes.data());
    return value;
}

PnmHeader parse_pnm_header(std::string_view bytes, bool allow_color) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
        throw byte_error("not a binary PGM/PPM file", 0);
    }
    if (bytes[1] == '6' && !allow_color) throw byte_error("expected a P5 (grey) file", 1);
    PnmHeader h;
    h.kind = bytes[1];
    std::size_t pos = 2;
    h.width = header_number(bytes, pos, "width");
    h.height = header_number(bytes, pos, "height");
    const std::size_t maxval_pos = pos;
    const std::size_t maxval = header_number(bytes, pos, "maxval");
    if (h.width == 0 || h.height == 0) throw byte_error("zero image dimension", maxval_pos);
    if (maxval != 255) {
        throw byte_error("unsupported maxval " + std::to_string(maxval) + " (need 255)",
                         maxval_pos);
    }
    if (pos >= bytes.size() || !is_space(bytes[pos])) {
        throw byte_error("missing whitespace after PNM header", pos);
    }
    h.payload_offset = pos + 1;
    const std::size_t channels = h.kind == '6' ? 3 : 1;
    const std::size_t need = h.width * h.height * channels;
    if (bytes.size() - h.payload_offset < need) {
        throw byte_error("truncated pixel data (expected " + std::to_string(need) + " bytes)",
                         bytes.size());
    }
    return h;
}

std::uint8_t to_byte(double v) {
    const double scaled = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<std::uint8_t>(scaled);
}

template <class T>
void put_le(std::string& out, T value) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::string_view bytes, std::size_t offset) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, bytes.data() + offset, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

constexpr std::string_view kRawMagic = "SALM";

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && is_space(f.front())) f.remove_prefix(1);
        while (!f.empty() && is_space(f.back())) f.remove_suffix(1);
    }
    return out;
}

// Splits text into lines with 1-based numbers; a trailing \r is dropped.
std::vector<std::pair<std::size_t, std::string_view>> numbered_lines(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t line_no = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.emplace_back(line_no, line);
        ++line_no;
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), is_space);
}

template <class T>
bool parse_number(std::string_view field, T& out) {
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc{} && ptr == field.data() + field.size();
}

bool glob_match(std::string_view pattern, std::string_view name) {
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t star = std::string_view::npos;
    std::size_t resume = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            resume = n;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            n = ++resume;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

}  // namespace

ImagePlane decode_pnm(std::string_view bytes) {
    const PnmHeader h = parse_pnm_header(bytes, true);
    ImagePlane plane(h.width, h.height);
    auto dst = plane.values();
    const auto* src = reinterpret_cast<const unsigned char*>(bytes.data() + h.payload_offset);
    if (h.kind == '5') {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] / 255.0;
    } else {
        for (std::size_t i = 0; i < dst.size(); ++i) {
            const double r = src[3 * i] / 255.0;
            const double g = src[3 * i + 1] / 255.0;
            const double b = src[3 * i + 2] / 255.0;
            dst[i] = 0.299 * r + 0.587 * g + 0.114 * b;
        }
    }
    return plane;
}

ImagePlane read_image(const std::filesystem::path& path) { return decode_pnm(read_file(path)); }

std::string encode_pgm(const ImagePlane& plane) {
    std::string out = "P5\n" + std::to_string(plane.width()) + " " +
                      std::to_string(plane.height()) + "\n255\n";
    out.reserve(out.size() + plane.size());
    for (double v : plane.values()) out.push_back(static_cast<char>(to_byte(v)));
    return out;
}

void write_pgm(const ImagePlane& plane, const std::filesystem::path& path) {
    write_file(path, encode_pgm(plane));
}

std::string encode_raw64(const ImagePlane& map) {
    std::string out(kRawMagic);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.width()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.height()));
    for (double v : map.values()) put_le<double>(out, v);
    return out;
}

ImagePlane decode_raw64(std::string_view bytes) {
    if (bytes.size() < 12) throw byte_error("truncated raw64 header", bytes.size());
    if (bytes.substr(0, 4) != kRawMagic) throw byte_error("bad raw64 magic", 0);
    const auto w = get_le<std::uint32_t>(bytes, 4);
    const auto h = get_le<std::uint32_t>(bytes, 8);
    if (w == 0 || h == 0) throw byte_error("zero map dimension", 4);
    const std::size_t n = std::size_t{w} * h;
    if (bytes.size() != 12 + 8 * n) {
        throw byte_error("raw64 payload should be " + std::to_string(8 * n) + " bytes",
                         std::min(bytes.size(), 12 + 8 * n));
    }
    ImagePlane plane(w, h);
    auto dst = plane.values();
    for (std::size_t i = 0; i < n; ++i) dst[i] = get_le<double>(bytes, 12 + 8 * i);
    return plane;
}

ImagePlane read_raw64(const std::filesystem::path& path) { return decode_raw64(read_file(path)); }

ImagePlane read_map(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.substr(0, 4) == kRawMagic) return decode_raw64(bytes);
    return decode_pnm(bytes);
}

void write_saliency(const ImagePlane& map, const std::filesystem::path& path, MapFormat format) {
    write_file(path, format == MapFormat::raw64 ? encode_raw64(map) : encode_pgm(map));
}

FixationSet parse_fixations(std::string_view text) {
    const auto lines = numbered_lines(text);
    if (lines.empty() || blank(lines.front().second)) {
        throw line_error("missing fixation header", 1);
    }
    const auto header = split_fields(lines.front().second);
    const bool has_subject = header.size() == 4 && header[3] == "subject";
    if (header.size() < 3 || header[0] != "frame" || header[1] != "x" || header[2] != "y" ||
        (header.size() == 4 && !has_subject) || header.size() > 4) {
        throw line_error("fixation header must be frame,x,y[,subject]", 1);
    }
    FixationSet set;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [line_no, line] = lines[i];
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size() && !(has_subject && fields.size() == 3)) {
            throw line_error("expected " + std::to_string(header.size()) + " fields", line_no);
        }
        Fixation f;
        if (!parse_number(fields[0], f.frame)) throw line_error("bad frame index", line_no);
        if (!parse_number(fields[1], f.x) || !std::isfinite(f.x)) {
            throw line_error("bad x coordinate", line_no);
        }
        if (!parse_number(fields[2], f.y) || !std::isfinite(f.y)) {
            throw line_error("bad y coordinate", line_no);
        }
        if (fields.size() == 4 && !fields[3].empty()) f.subject = std::string(fields[3]);
        set.records.push_back(std::move(f));
    }
    return set;
}

FixationSet read_fixations(const std::filesystem::path& path) {
    return parse_fixations(read_file(path));
}

LabelMap decode_label_map(std::string_view bytes) {
    const PnmHeader h = parse_pnm_header(bytes, false);
    LabelMap labels;
    labels.width = h.width;
    labels.height = h.height;
    labels.class_ids.resize(h.width * h.height);
    const auto* src = reinterpret_cast<const unsigned char*>(bytes.data() + h.payload_offset);
    for (std::size_t i = 0; i < labels.class_ids.size(); ++i) labels.class_ids[i] = src[i];
    return labels;
}

LabelMap read_label_map(const std::filesystem::path& path) {
    return decode_label_map(read_file(path));
}

ImportanceTable parse_importance_table(std::string_view text) {
    const auto lines = numbered_lines(text);
    const auto header = lines.empty() ? std::vector<std::string_view>{}
                                      : split_fields(lines.front().second);
    if (header.size() != 3 || header[0] != "class_id" || header[1] != "class_name" ||
        header[2] != "importance") {
        throw line_error("importance table header must be class_id,class_name,importance", 1);
    }
    ImportanceTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [line_no, line] = lines[i];
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 3) throw line_error("expected 3 fields", line_no);
        int id = 0;
        int importance = 0;
        if (!parse_number(fields[0], id)) throw line_error("bad class id", line_no);
        if (!parse_number(fields[2], importance)) throw line_error("bad importance", line_no);
        if (!table.emplace(id, ClassImportance{std::string(fields[1]), importance}).second) {
            throw line_error("duplicate class id " + std::to_string(id), line_no);
        }
    }
    return table;
}

ImportanceTable read_importance_table(const std::filesystem::path& path) {
    return parse_importance_table(read_file(path));
}

std::string format_importance_table(const ImportanceTable& table) {
    std::string out = "class_id,class_name,importance\n";
    for (const auto& [id, row] : table) {
        out += std::to_string(id) + "," + row.name + "," + std::to_string(row.importance) + "\n";
    }
    return out;
}

FrameSequenceManifest list_frame_sequence(const std::filesystem::path& directory,
                                          std::string_view pattern) {
    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec)) {
        throw IoError("not a directory: " + directory.string());
    }
    FrameSequenceManifest manifest;
    manifest.directory = directory;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (glob_match(pattern, name)) manifest.names.push_back(name);
    }
    std::sort(manifest.names.begin(), manifest.names.end());
    if (manifest.names.empty()) {
        throw InputError("no frames matching '" + std::string(pattern) + "' in " +
                         directory.string());
    }
    for (const auto& name : manifest.names) {
        const std::string bytes = read_file(directory / name);
        const PnmHeader h = parse_pnm_header(bytes, true);
        if (manifest.width == 0) {
            manifest.width = h.width;
            manifest.height = h.height;
        } else if (h.width != manifest.width || h.height != manifest.height) {
            throw FormatError("frame " + name + " is " + std::to_string(h.width) + "x" +
                                  std::to_string(h.height) + ", expected " +
                                  std::to_string(manifest.width) + "x" +
                                  std::to_string(manifest.height),
                              FormatError::Unit::file, 0);
        }
    }
    return manifest;
}

FrameStack read_frame_stack(const FrameSequenceManifest& manifest) {
    FrameStack stack;
    for (const auto& name : manifest.names) {
        stack.frames.push_back(read_image(manifest.directory / name));
    }
    return stack;
}

}  // namespace infosal
