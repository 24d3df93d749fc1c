#pragma once

// Readers and writers for the on-disk formats: 8-bit PNM images, raw64
// saliency maps, fixation CSV, PGM label maps and importance-table CSV.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "infosal/eval.hpp"
#include "infosal/image.hpp"
#include "infosal/saliency.hpp"

namespace infosal {

// P5 or P6 with maxval 255, values scaled to [0, 1]. P6 is reduced to Rec.601
// luma 0.299 R + 0.587 G + 0.114 B.
ImagePlane read_image(const std::filesystem::path& path);
ImagePlane decode_pnm(std::string_view bytes);

// P5, round(v * 255) clamped to [0, 255].
void write_pgm(const ImagePlane& plane, const std::filesystem::path& path);
std::string encode_pgm(const ImagePlane& plane);

enum class MapFormat { pgm8, raw64 };

// raw64: "SALM", width and height as little-endian u32, then width*height
// little-endian IEEE-754 doubles in row-major order.
void write_saliency(const ImagePlane& map, const std::filesystem::path& path, MapFormat format);
std::string encode_raw64(const ImagePlane& map);
ImagePlane decode_raw64(std::string_view bytes);
ImagePlane read_raw64(const std::filesystem::path& path);

// A map file in either format, chosen by content (magic bytes).
ImagePlane read_map(const std::filesystem::path& path);

// CSV with header `frame,x,y[,subject]`.
FixationSet read_fixations(const std::filesystem::path& path);
FixationSet parse_fixations(std::string_view text);

// P5 whose pixel values are class ids.
LabelMap read_label_map(const std::filesystem::path& path);
LabelMap decode_label_map(std::string_view bytes);

// CSV `class_id,class_name,importance`.
ImportanceTable read_importance_table(const std::filesystem::path& path);
ImportanceTable parse_importance_table(std::string_view text);
std::string format_importance_table(const ImportanceTable& table);

struct FrameSequenceManifest {
    std::filesystem::path directory;
    std::vector<std::string> names;
    std::size_t width = 0;
    std::size_t height = 0;

    std::size_t size() const noexcept { return names.size(); }
};

// Files in `directory` whose names match the glob `pattern` (`*` and `?`),
// sorted lexicographically. All frames must share one size.
FrameSequenceManifest list_frame_sequence(const std::filesystem::path& directory,
                                          std::string_view pattern = "*");

FrameStack read_frame_stack(const FrameSequenceManifest& manifest);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace infosal
