#include "config.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace csalsa::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* ctx, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw std::runtime_error(std::string("unknown key \"") + it.key() + "\" in " + ctx);
    }
}

template <class T>
void read_if(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

BlurKind parse_blur_kind(const std::string& s) {
    if (s == "uniform9") return BlurKind::Uniform9;
    if (s == "gaussian") return BlurKind::Gaussian;
    if (s == "hij") return BlurKind::Hij;
    throw std::runtime_error("unknown blur kind \"" + s + "\" (want uniform9|gaussian|hij)");
}

} // namespace

ImageSource parse_image_source(const std::string& text) {
    ImageSource src;
    if (text == "synthetic") {
        src.kind = ImageSource::Kind::Synthetic;
        return src;
    }
    if (text.rfind("synthetic:", 0) == 0) {
        src.kind = ImageSource::Kind::Synthetic;
        src.n = std::stoi(text.substr(10));
        return src;
    }
    src.kind = ImageSource::Kind::File;
    src.path = text;
    return src;
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }

    check_keys(j, "config",
               {"schema_version", "name", "problem", "image", "blur", "frame_levels", "size",
                "lines", "sigma2", "eps_factor", "seed", "solver", "outputs"});

    RunConfig cfg;
    ExperimentSpec& spec = cfg.spec;

    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
        throw std::runtime_error("unsupported schema_version (have 1)");

    const std::string problem = j.at("problem").get<std::string>();
    if (problem == "deblur")
        spec.problem = ExperimentSpec::Problem::Deblur;
    else if (problem == "mri")
        spec.problem = ExperimentSpec::Problem::MRI;
    else
        throw std::runtime_error("unknown problem \"" + problem + "\" (want deblur|mri)");

    read_if(j, "name", spec.name);
    if (spec.name.empty()) spec.name = problem;

    if (spec.problem == ExperimentSpec::Problem::Deblur) {
        if (!j.contains("image")) throw std::runtime_error("deblur config requires \"image\"");
        spec.image = parse_image_source(j.at("image").get<std::string>());
        if (j.contains("blur")) {
            const json& jb = j.at("blur");
            check_keys(jb, "blur", {"kind", "size", "std", "halfwidth"});
            spec.blur.kind = parse_blur_kind(jb.at("kind").get<std::string>());
            read_if(jb, "size", spec.blur.size);
            read_if(jb, "std", spec.blur.std_dev);
            read_if(jb, "halfwidth", spec.blur.halfwidth);
        }
        read_if(j, "frame_levels", spec.frame_levels);
    } else {
        read_if(j, "size", spec.mri_size);
        read_if(j, "lines", spec.mri_lines);
    }

    read_if(j, "sigma2", spec.sigma2);
    read_if(j, "eps_factor", spec.eps_factor);
    read_if(j, "seed", spec.seed);

    if (j.contains("solver")) {
        const json& js = j.at("solver");
        check_keys(js, "solver",
                   {"mu", "max_iters", "feas_rtol", "change_rtol", "tv_inner_iters",
                    "tv_inner_tol"});
        if (js.contains("mu")) spec.mu = js.at("mu").get<double>();
        read_if(js, "max_iters", spec.max_iters);
        read_if(js, "feas_rtol", spec.feas_rtol);
        read_if(js, "change_rtol", spec.change_rtol);
        read_if(js, "tv_inner_iters", spec.tv_inner_iters);
        read_if(js, "tv_inner_tol", spec.tv_inner_tol);
    }

    if (j.contains("outputs")) {
        const json& jo = j.at("outputs");
        check_keys(jo, "outputs", {"image", "trace", "report"});
        read_if(jo, "image", cfg.outputs.image);
        read_if(jo, "trace", cfg.outputs.trace);
        read_if(jo, "report", cfg.outputs.report);
    }
    return cfg;
}

} // namespace csalsa::cli
