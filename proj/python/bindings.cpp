#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tripchain/anchors.hpp"
#include "tripchain/chains.hpp"
#include "tripchain/hotspot.hpp"
#include "tripchain/pipeline.hpp"
#include "tripchain/stats.hpp"
#include "tripchain/synth.hpp"

namespace py = pybind11;
using namespace tripchain;

namespace {

using LonLat = std::tuple<double, double>;

geo::GeoPoint point(const LonLat& p) { return {std::get<0>(p), std::get<1>(p)}; }

// Visit ids: positive = in-city anchor, 0 = out-of-city (becomes a star).
std::vector<APVisit> to_visits(const std::vector<int>& ids) {
    std::vector<APVisit> out;
    for (int id : ids) {
        APVisit v;
        v.ap_id = id > 0 ? id : APVisit::kStarNode;
        v.in_city = id > 0;
        out.push_back(v);
    }
    return merge_consecutive(collapse_out_of_city(out));
}

py::dict chain_metrics(const std::vector<int>& ids) {
    const auto visits = to_visits(ids);
    py::dict d;
    d["label"] = canonicalize(visits).str();
    d["n_aps"] = distinct_in_city_aps(visits);
    d["n_edges"] = static_cast<int>(visits.size()) - 1;
    d["degree"] = d["n_aps"].cast<int>() > 0 ? py::cast(chain_degree(visits)) : py::none();
    return d;
}

py::tuple anchor_points(const std::vector<std::tuple<std::string, double, double, long, long, bool>>& trace,
                        double roaming_distance_m, long min_ap_stay_s) {
    std::vector<StayRecord> rs;
    for (const auto& [tower, lon, lat, start, end, in_city] : trace) {
        StayRecord r;
        r.tower_id = tower;
        r.location = {lon, lat};
        r.start = std::chrono::seconds(start);
        r.end = std::chrono::seconds(end);
        r.in_city = in_city;
        if (r.end < r.start) throw ValidationError("trace entry for tower " + tower + " ends before it starts");
        rs.push_back(std::move(r));
    }
    const auto aps = extract_anchor_points(rs, roaming_distance_m);
    py::list out;
    for (const auto& ap : aps) {
        py::dict d;
        d["ap_id"] = ap.ap_id;
        d["seed_tower"] = ap.seed_tower;
        d["member_towers"] = ap.member_towers;
        d["location"] = LonLat{ap.location.lon, ap.location.lat};
        d["total_stay_s"] = ap.total_stay_s;
        d["in_city"] = ap.in_city;
        out.append(d);
    }
    std::vector<int> seq;
    for (const auto& v : ap_sequence(rs, AnchorIndex(aps), min_ap_stay_s)) seq.push_back(v.ap_id);
    return py::make_tuple(out, seq);
}

py::dict fit(const std::map<int, double>& pmf) {
    const auto f = fit_lognormal(pmf);
    py::dict d;
    d["mu"] = f.mu;
    d["sigma"] = f.sigma;
    d["r_squared"] = f.r_squared;
    d["support_min"] = f.support_min;
    d["support_max"] = f.support_max;
    return d;
}

py::dict raster(const std::vector<std::tuple<double, double, double>>& points, double radius_m,
                std::optional<double> cell_size_m,
                std::optional<std::tuple<double, double, double, double>> extent, unsigned workers) {
    std::vector<WeightedPoint> pts;
    for (const auto& [lon, lat, w] : points) pts.push_back({{lon, lat}, w});
    if (pts.empty()) throw ValidationError("kernel density needs at least one point");
    const GeoExtent ext = extent ? GeoExtent{std::get<0>(*extent), std::get<1>(*extent), std::get<2>(*extent),
                                             std::get<3>(*extent)}
                                 : padded_extent(pts, radius_m);
    Raster r;
    {
        py::gil_scoped_release release;
        r = kde_raster(pts, radius_m, cell_size_m.value_or(radius_m / 10.0), ext, workers);
    }
    py::array_t<double> values({r.n_rows, r.n_cols});
    std::copy(r.values.begin(), r.values.end(), values.mutable_data());
    py::dict d;
    d["values"] = values;
    d["cell_size_m"] = r.cell_size_m;
    d["xll"] = r.xll;
    d["yll"] = r.yll;
    d["projection_origin"] = LonLat{r.projection_origin.lon, r.projection_origin.lat};
    d["lower_left"] = LonLat{r.origin.lon, r.origin.lat};
    d["mass"] = r.mass();
    return d;
}

py::dict pipeline(const std::string& records, const std::string& city, const std::string& out_dir,
                  const std::optional<py::dict>& config, unsigned workers) {
    StudyConfig cfg;
    if (config) {
        for (const auto& [k, v] : *config) {
            std::string value = py::isinstance<py::bool_>(v) ? (v.cast<bool>() ? "true" : "false")
                                                              : py::str(v).cast<std::string>();
            cfg.set(py::str(k).cast<std::string>(), value);
        }
    }
    cfg.validate();
    RunManifest m;
    {
        py::gil_scoped_release release;
        m = run_pipeline(cfg, {records, city}, out_dir, workers);
    }
    py::dict counts, outputs;
    for (const auto& [k, v] : m.counts) counts[py::str(k)] = v;
    for (const auto& [k, v] : m.outputs) outputs[py::str(k)] = v;
    py::dict d;
    d["counts"] = counts;
    d["outputs"] = outputs;
    d["notes"] = m.notes;
    return d;
}

py::dict synthesize(const std::string& scenario, const std::string& out_dir, std::optional<std::uint64_t> seed,
                    std::optional<std::size_t> n_users, std::optional<double> ping_pong_rate, unsigned workers) {
    auto spec = ScenarioSpec::load(scenario);
    if (seed) spec.seed = *seed;
    if (n_users) spec.n_users = *n_users;
    if (ping_pong_rate) spec.ping_pong_rate = *ping_pong_rate;
    SyntheticPopulation pop;
    {
        py::gil_scoped_release release;
        pop = generate_population(spec, workers);
        write_artifact(out_dir, "records.csv", [&](std::ostream& o) { write_stay_records(o, pop.records); });
        write_artifact(out_dir, "truth.csv", [&](std::ostream& o) { write_ground_truth(o, pop.truth); });
        write_artifact(out_dir, "city.geojson", [&](std::ostream& o) { write_city_geojson(o, pop.city_ring); });
        write_artifact(out_dir, "city_towers.txt", [&](std::ostream& o) { write_in_city_towers(o, pop); });
    }
    py::dict d;
    d["records"] = pop.records.size();
    d["user_days"] = pop.truth.size();
    return d;
}

}  // namespace

PYBIND11_MODULE(_tripchain, m) {
    m.doc() = "Daily trip-chain analysis of cellphone stay records";
    m.attr("__version__") = kToolVersion;

    static py::exception<Error> tripchain_error(m, "TripchainError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            tripchain_error(e.what());
        } catch (const std::domain_error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("haversine_m", [](const LonLat& a, const LonLat& b) { return geo::haversine_m(point(a), point(b)); },
          py::arg("a"), py::arg("b"), "Great-circle distance in meters between (lon, lat) pairs.");
    m.def("local_project",
          [](const LonLat& origin, const LonLat& p) {
              const auto xy = geo::local_project(point(origin), point(p));
              return std::make_tuple(xy.x, xy.y);
          },
          py::arg("origin"), py::arg("p"), "Equirectangular (x, y) meters of p about origin.");
    m.def("local_unproject",
          [](const LonLat& origin, const std::tuple<double, double>& xy) {
              const auto p = geo::local_unproject(point(origin), {std::get<0>(xy), std::get<1>(xy)});
              return LonLat{p.lon, p.lat};
          },
          py::arg("origin"), py::arg("xy"));

    m.def("canonicalize", [](const std::vector<int>& ids) { return canonicalize(to_visits(ids)).str(); },
          py::arg("visits"),
          "Canonical chain label of a visit sequence; positive ids are in-city anchors, 0 is out of city.");
    m.def("chain_metrics", &chain_metrics, py::arg("visits"), "Label, N, E and K of a visit sequence.");
    m.def("classify_category", [](const std::string& label) {
              return std::string(to_string(classify_category(ChainTypeLabel(label))));
          },
          py::arg("label"));
    m.def("anchor_points", &anchor_points, py::arg("trace"), py::arg("roaming_distance_m") = 500.0,
          py::arg("min_ap_stay_s") = 0,
          "Cluster a trace of (tower_id, lon, lat, start_s, end_s, in_city) into anchor points.\n"
          "Returns (anchor points, visit sequence of ap ids).");

    m.def("lognormal_density", &lognormal_density, py::arg("x"), py::arg("mu"), py::arg("sigma"));
    m.def("fit_lognormal", &fit, py::arg("pmf"), "Least-squares log-normal fit of an {n: probability} pmf.");
    m.def("kde_raster", &raster, py::arg("points"), py::arg("radius_m"), py::arg("cell_size_m") = py::none(),
          py::arg("extent") = py::none(), py::arg("workers") = 1,
          "Quartic-kernel density (per km^2) of (lon, lat, weight) points.");

    m.def("run_pipeline", &pipeline, py::arg("records"), py::arg("city"), py::arg("out_dir"),
          py::arg("config") = py::none(), py::arg("workers") = 1,
          "Run every stage and write outputs plus manifest.txt into out_dir.");
    m.def("synth", &synthesize, py::arg("scenario"), py::arg("out_dir"), py::arg("seed") = py::none(),
          py::arg("n_users") = py::none(), py::arg("ping_pong_rate") = py::none(), py::arg("workers") = 1,
          "Generate a synthetic population with ground truth from a scenario file.");
}
