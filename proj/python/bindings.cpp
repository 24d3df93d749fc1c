#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "infosal/decorrelate.hpp"
#include "infosal/errors.hpp"
#include "infosal/eval.hpp"
#include "infosal/io.hpp"
#include "infosal/kdp_entropy.hpp"
#include "infosal/saliency.hpp"
#include "infosal/wavelet.hpp"

namespace py = pybind11;
using namespace infosal;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ImagePlane to_plane(const Array& a) {
    if (a.ndim() != 2) throw InputError("expected a 2-D array (height, width)");
    const auto h = static_cast<std::size_t>(a.shape(0));
    const auto w = static_cast<std::size_t>(a.shape(1));
    std::vector<double> values(a.data(), a.data() + w * h);
    return ImagePlane(w, h, std::move(values));
}

Array to_array(const ImagePlane& p) {
    Array out({p.height(), p.width()});
    std::memcpy(out.mutable_data(), p.values().data(), p.size() * sizeof(double));
    return out;
}

FrameStack to_stack(const Array& a) {
    if (a.ndim() != 3) throw InputError("expected a 3-D array (frames, height, width)");
    FrameStack s;
    const auto t = static_cast<std::size_t>(a.shape(0));
    const auto h = static_cast<std::size_t>(a.shape(1));
    const auto w = static_cast<std::size_t>(a.shape(2));
    for (std::size_t f = 0; f < t; ++f) {
        const double* src = a.data() + f * w * h;
        s.frames.emplace_back(w, h, std::vector<double>(src, src + w * h));
    }
    return s;
}

// Rows are samples. `roles` is a string of 's' (surround) and 'c' (center).
SampleMatrix to_samples(const Array& a, const std::string& roles) {
    if (a.ndim() != 2) throw InputError("expected a 2-D array (samples, dims)");
    const auto n = static_cast<std::size_t>(a.shape(0));
    const auto d = static_cast<std::size_t>(a.shape(1));
    std::vector<DimRole> tags;
    for (char c : roles) {
        if (c != 's' && c != 'c') throw InputError("roles must be a string of 's' and 'c'");
        tags.push_back(c == 's' ? DimRole::surround : DimRole::center);
    }
    return SampleMatrix::from_rows({a.data(), n * d}, n, d, std::move(tags));
}

Method to_method(const std::string& m) {
    if (m == "kld") return Method::kld;
    if (m == "con") return Method::con;
    throw InputError("method must be 'kld' or 'con', got '" + m + "'");
}

// (k, 2) array of x, y in `frame`, or (k, 3) of frame, x, y.
FixationSet to_fixations(const Array& a, std::size_t frame) {
    if (a.ndim() != 2 || (a.shape(1) != 2 && a.shape(1) != 3)) {
        throw InputError("fixations must be a (k, 2) array of x, y or (k, 3) of frame, x, y");
    }
    FixationSet set;
    const auto k = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    for (std::size_t i = 0; i < k; ++i) {
        const double* row = a.data() + i * cols;
        Fixation f;
        if (cols == 3) {
            if (!(row[0] >= 0.0) || row[0] != static_cast<double>(static_cast<std::size_t>(row[0]))) {
                throw InputError("fixation frame must be a non-negative integer");
            }
            f.frame = static_cast<std::size_t>(row[0]);
        } else {
            f.frame = frame;
        }
        f.x = row[cols - 2];
        f.y = row[cols - 1];
        set.records.push_back(f);
    }
    return set;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Information-theoretic saliency maps and their evaluation metrics";

    auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", error.ptr());
    py::register_exception<AdmissibilityError>(m, "AdmissibilityError", error.ptr());
    py::register_exception<UndefinedError>(m, "UndefinedError", error.ptr());
    py::register_exception<IoError>(m, "IoError", error.ptr());
    py::register_exception<FormatError>(m, "FormatError", error.ptr());

    m.def("joint_entropy", [](const Array& samples) {
        return estimate_joint_entropy(to_samples(samples, ""));
    }, py::arg("samples"), "Differential entropy (nats) of the rows of an (n, d) array.");
    m.def("conditional_entropy", [](const Array& samples, const std::string& roles) {
        return estimate_conditional_entropy(to_samples(samples, roles));
    }, py::arg("samples"), py::arg("roles"), "H(center | surround); roles like 'ssssc'.");
    m.def("kl_divergence", [](const Array& samples, const std::string& roles) {
        return estimate_kl_divergence(to_samples(samples, roles));
    }, py::arg("samples"), py::arg("roles"), "Center-vs-surround KL score; surround dims first.");

    m.def("msf_filter", [](const Array& img) { return to_array(msf_filter(to_plane(img))); },
          py::arg("image"));
    m.def("msf_denoised", [](const Array& img) { return to_array(msf_denoised(to_plane(img))); },
          py::arg("image"));
    m.def("dct_ii", [](const std::vector<double>& x) { return dct_ii(x); }, py::arg("x"));
    m.def("idct_ii", [](const std::vector<double>& c) { return idct_ii(c); }, py::arg("coefficients"));

    m.def("spatial_saliency",
          [](const Array& img, const std::string& method, std::size_t patch_size, bool denoise, bool pca) {
              SpatialOptions o;
              o.method = to_method(method);
              o.patch_size = patch_size;
              o.preprocess = denoise ? Preprocess::msf_denoised : Preprocess::msf;
              o.pca = pca;
              const ImagePlane plane = to_plane(img);
              ImagePlane out;
              {
                  py::gil_scoped_release release;
                  out = spatial_saliency(plane, o).values;
              }
              return to_array(out);
          },
          py::arg("image"), py::arg("method") = "kld", py::arg("patch_size") = 0,
          py::arg("denoise") = true, py::arg("pca") = false,
          "Saliency map in [0, 1] of a (height, width) image.");

    auto temporal = [](bool with_spatial) {
        return [with_spatial](const Array& frames, const std::string& method, std::size_t patch_size,
                              bool denoise) {
            const FrameStack stack = to_stack(frames);
            TemporalOptions o;
            o.method = to_method(method);
            o.patch_size = patch_size;
            o.denoise = denoise;
            o.frames = stack.size();
            ImagePlane out;
            {
                py::gil_scoped_release release;
                out = (with_spatial ? spatiotemporal_saliency(stack, o) : temporal_saliency(stack, o)).values;
            }
            return to_array(out);
        };
    };
    m.def("temporal_saliency", temporal(false), py::arg("frames"), py::arg("method") = "kld",
          py::arg("patch_size") = 0, py::arg("denoise") = true,
          "Temporal saliency of a (frames, height, width) stack, oldest frame first.");
    m.def("spatiotemporal_saliency", temporal(true), py::arg("frames"), py::arg("method") = "kld",
          py::arg("patch_size") = 0, py::arg("denoise") = true);

    m.def("bias_ratio", [](const Array& img, std::size_t patch_size, bool denoise) {
        return bias_ratio(to_plane(img), patch_size, denoise ? Preprocess::msf_denoised : Preprocess::msf);
    }, py::arg("image"), py::arg("patch_size"), py::arg("denoise") = true);

    m.def("auc", [](const Array& map, const Array& fixations, std::size_t frame) {
        return auc(roc_curve(to_plane(map), to_fixations(fixations, frame), frame));
    }, py::arg("map"), py::arg("fixations"), py::arg("frame") = 0);
    m.def("nsv", [](const Array& map, double x, double y, std::size_t radius) {
        return nsv(to_plane(map), Fixation{0, x, y, std::nullopt}, radius);
    }, py::arg("map"), py::arg("x"), py::arg("y"), py::arg("radius") = kDefaultNsvRadius);
    m.def("cas", [](const Array& map, const Array& fixations, std::size_t radius, std::size_t n_random,
                    std::uint64_t seed, std::size_t frame) {
        return cas(to_plane(map), to_fixations(fixations, frame), frame, radius, n_random, seed);
    }, py::arg("map"), py::arg("fixations"), py::arg("radius") = kDefaultNsvRadius,
          py::arg("n_random") = kDefaultRandomCount, py::arg("seed") = 0, py::arg("frame") = 0);
    m.def("normxcorr", [](const Array& map, const Array& importance) {
        return normxcorr(to_plane(map), to_plane(importance));
    }, py::arg("map"), py::arg("importance"));

    m.def("read_image", [](const std::filesystem::path& path) { return to_array(read_image(path)); },
          py::arg("path"));
    m.def("write_saliency", [](const Array& map, const std::filesystem::path& path, const std::string& format) {
        if (format != "pgm8" && format != "raw64") throw InputError("format must be 'pgm8' or 'raw64'");
        write_saliency(to_plane(map), path, format == "raw64" ? MapFormat::raw64 : MapFormat::pgm8);
    }, py::arg("map"), py::arg("path"), py::arg("format") = "pgm8");
    m.def("read_map", [](const std::filesystem::path& path) { return to_array(read_map(path)); },
          py::arg("path"));
}
