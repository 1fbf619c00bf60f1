#include "hbarsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hbarsim/errors.hpp"

namespace hbarsim {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& section,
                         const std::set<std::string>& allowed) {
    for (const auto& item : obj.items())
        if (!allowed.contains(item.key()))
            throw ConfigError("unknown key '" + section + "." + item.key() + "'");
}

const json& require(const json& obj, const std::string& section,
                    const std::string& key) {
    if (!obj.contains(key))
        throw ConfigError("missing key '" + section + "." + key + "'");
    return obj.at(key);
}

double number(const json& obj, const std::string& section, const std::string& key) {
    const json& value = require(obj, section, key);
    if (!value.is_number())
        throw ConfigError("key '" + section + "." + key + "' must be a number");
    return value.get<double>();
}

int integer(const json& obj, const std::string& section, const std::string& key) {
    const json& value = require(obj, section, key);
    if (!value.is_number_integer())
        throw ConfigError("key '" + section + "." + key + "' must be an integer");
    return value.get<int>();
}

std::string text(const json& obj, const std::string& section, const std::string& key) {
    const json& value = require(obj, section, key);
    if (!value.is_string())
        throw ConfigError("key '" + section + "." + key + "' must be a string");
    return value.get<std::string>();
}

const json& object(const json& obj, const std::string& key) {
    const json& value = require(obj, "config", key);
    if (!value.is_object())
        throw ConfigError("key '" + key + "' must be an object");
    return value;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");

    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    reject_unknown_keys(root, "config",
                        {"material", "geometry", "cavity", "qubit", "phonon_band",
                         "sweep", "noise"});

    const json& jmat = object(root, "material");
    reject_unknown_keys(jmat, "material", {"name", "c44_pa", "density_kg_m3"});
    const json& jgeo = object(root, "geometry");
    reject_unknown_keys(jgeo, "geometry", {"thickness_m", "dipole_angle_rad"});
    const json& jcav = object(root, "cavity");
    reject_unknown_keys(jcav, "cavity",
                        {"f_c_hz", "kappa_total_hz", "kappa_in_hz", "kappa_out_hz"});
    const json& jband = object(root, "phonon_band");
    reject_unknown_keys(jband, "phonon_band",
                        {"center_hz", "halfwidth_hz", "g_ref_hz", "gamma_hz"});
    const json& jsweep = object(root, "sweep");
    reject_unknown_keys(jsweep, "sweep",
                        {"f_min_hz", "f_max_hz", "f_points", "flux_min", "flux_max",
                         "flux_points", "eigen_grid_points", "eigen_mode_count"});

    try {
        RunConfig cfg{
            MaterialSpec(text(jmat, "material", "name"),
                         number(jmat, "material", "c44_pa"),
                         number(jmat, "material", "density_kg_m3")),
            SlabGeometry(number(jgeo, "geometry", "thickness_m"),
                         jgeo.contains("dipole_angle_rad")
                             ? number(jgeo, "geometry", "dipole_angle_rad")
                             : 0.0),
            CavityParams(number(jcav, "cavity", "f_c_hz"),
                         number(jcav, "cavity", "kappa_total_hz"),
                         number(jcav, "cavity", "kappa_in_hz"),
                         number(jcav, "cavity", "kappa_out_hz")),
            std::nullopt,
            PhononBand{number(jband, "phonon_band", "center_hz"),
                       number(jband, "phonon_band", "halfwidth_hz"),
                       number(jband, "phonon_band", "g_ref_hz"),
                       number(jband, "phonon_band", "gamma_hz")},
            SweepSpec{},
            NoiseSpec{},
        };

        if (!(cfg.phonon_band.center_hz > 0.0))
            throw ConfigError("'phonon_band.center_hz' must be positive");
        if (!(cfg.phonon_band.halfwidth_hz > 0.0))
            throw ConfigError("'phonon_band.halfwidth_hz' must be positive");
        if (!(cfg.phonon_band.g_ref_hz > 0.0))
            throw ConfigError("'phonon_band.g_ref_hz' must be positive");
        if (!(cfg.phonon_band.gamma_hz > 0.0))
            throw ConfigError("'phonon_band.gamma_hz' must be positive");

        if (root.contains("qubit")) {
            const json& jq = object(root, "qubit");
            reject_unknown_keys(jq, "qubit", {"f_max_hz", "flux", "gamma_q_hz", "g_hz"});
            cfg.qubit.emplace(number(jq, "qubit", "f_max_hz"),
                              number(jq, "qubit", "flux"),
                              number(jq, "qubit", "gamma_q_hz"),
                              number(jq, "qubit", "g_hz"));
        }

        SweepSpec sweep;
        sweep.f_min_hz = number(jsweep, "sweep", "f_min_hz");
        sweep.f_max_hz = number(jsweep, "sweep", "f_max_hz");
        sweep.f_points = integer(jsweep, "sweep", "f_points");
        if (jsweep.contains("flux_min")) sweep.flux_min = number(jsweep, "sweep", "flux_min");
        if (jsweep.contains("flux_max")) sweep.flux_max = number(jsweep, "sweep", "flux_max");
        if (jsweep.contains("flux_points"))
            sweep.flux_points = integer(jsweep, "sweep", "flux_points");
        if (jsweep.contains("eigen_grid_points"))
            sweep.eigen_grid_points = integer(jsweep, "sweep", "eigen_grid_points");
        if (jsweep.contains("eigen_mode_count"))
            sweep.eigen_mode_count = integer(jsweep, "sweep", "eigen_mode_count");

        if (sweep.f_points < 1) throw ConfigError("'sweep.f_points' must be >= 1");
        if (sweep.f_points > 1 && !(sweep.f_max_hz > sweep.f_min_hz))
            throw ConfigError("'sweep.f_max_hz' must exceed 'sweep.f_min_hz'");
        if (sweep.flux_points < 1) throw ConfigError("'sweep.flux_points' must be >= 1");
        if (sweep.flux_points > 1 && !(sweep.flux_max > sweep.flux_min))
            throw ConfigError("'sweep.flux_max' must exceed 'sweep.flux_min'");
        if (sweep.eigen_grid_points < 16)
            throw ConfigError("'sweep.eigen_grid_points' must be >= 16");
        if (sweep.eigen_mode_count < 1)
            throw ConfigError("'sweep.eigen_mode_count' must be >= 1");
        cfg.sweep = sweep;

        if (root.contains("noise")) {
            const json& jn = object(root, "noise");
            reject_unknown_keys(jn, "noise", {"sigma", "seed"});
            NoiseSpec noise;
            noise.sigma = number(jn, "noise", "sigma");
            if (!(noise.sigma >= 0.0)) throw ConfigError("'noise.sigma' must be >= 0");
            if (jn.contains("seed")) {
                const json& seed = jn.at("seed");
                if (!seed.is_number_unsigned())
                    throw ConfigError("key 'noise.seed' must be a non-negative integer");
                noise.seed = seed.get<std::uint64_t>();
            }
            cfg.noise = noise;
        }

        return cfg;
    } catch (const std::invalid_argument& e) {
        // constructor invariants surface as config errors with the section name
        throw ConfigError(e.what());
    }
}

}  // namespace hbarsim
