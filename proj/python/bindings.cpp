#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdlib>

#include "goosead/commands.hpp"
#include "goosead/detector.hpp"
#include "goosead/evt.hpp"
#include "goosead/goose.hpp"
#include "goosead/io.hpp"
#include "goosead/log.hpp"
#include "goosead/pcap.hpp"

namespace py = pybind11;
using namespace goosead;

namespace {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kPurity: return "purity";
    case ErrorKind::kUnsorted: return "unsorted";
    case ErrorKind::kFieldOverflow: return "field_overflow";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kOverlap: return "overlap";
  }
  return "unknown";
}

MacAddress mac_from(const std::string& text) {
  const auto m = parse_mac(text);
  if (!m) throw Error(ErrorKind::kConfig, "bad MAC address: " + text);
  return *m;
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

py::dict row_dict(const EvalRow& r) {
  py::dict d;
  d["kind"] = std::string(label_name(r.kind));
  d["view"] = std::string(eval_view_name(r.view));
  d["tp"] = r.tp;
  d["fp"] = r.fp;
  d["tn"] = r.tn;
  d["fn"] = r.fn;
  d["recall"] = r.recall;
  d["specificity"] = r.specificity;
  d["precision"] = r.precision;
  d["f1"] = r.f1;
  d["no_positives"] = r.no_positives;
  return d;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GOOSEAD_SEED")) return std::strtoull(env, nullptr, 10);
  return kDefaultSeed;
}

}  // namespace

PYBIND11_MODULE(_goosead, m) {
  m.doc() = "GOOSE anomaly detection core";
  m.attr("__version__") = kToolVersion;

  static py::exception<Error> error_type(m, "GooseadError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args: (message, kind, CLI exit code)
      py::tuple args = py::make_tuple(e.what(), kind_name(e.kind()), cmd::exit_code(e));
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  m.def("set_log_level", [](const std::string& level) {
    if (level == "debug") log::set_level(log::Level::kDebug);
    else if (level == "info") log::set_level(log::Level::kInfo);
    else if (level == "warning") log::set_level(log::Level::kWarning);
    else if (level == "error") log::set_level(log::Level::kError);
    else if (level == "silent") log::set_level(log::Level::kSilent);
    else throw Error(ErrorKind::kConfig, "unknown log level " + level);
  }, py::arg("level"));

  py::class_<GooseFrame>(m, "GooseFrame")
      .def(py::init<>())
      .def_readwrite("ts_us", &GooseFrame::ts)
      .def_property("dst_mac", [](const GooseFrame& f) { return mac_to_string(f.dst_mac); },
                    [](GooseFrame& f, const std::string& s) { f.dst_mac = mac_from(s); })
      .def_property("src_mac", [](const GooseFrame& f) { return mac_to_string(f.src_mac); },
                    [](GooseFrame& f, const std::string& s) { f.src_mac = mac_from(s); })
      .def_property("vlan",
                    [](const GooseFrame& f) -> py::object {
                      if (!f.vlan) return py::none();
                      return py::make_tuple(f.vlan->pcp, f.vlan->vid);
                    },
                    [](GooseFrame& f, py::object v) {
                      if (v.is_none()) {
                        f.vlan.reset();
                      } else {
                        const auto t = v.cast<std::pair<std::uint8_t, std::uint16_t>>();
                        f.vlan = VlanTag{t.first, t.second};
                      }
                    })
      .def_readwrite("appid", &GooseFrame::appid)
      .def_readonly("pdu_len", &GooseFrame::pdu_len)
      .def_readwrite("gocb_ref", &GooseFrame::gocb_ref)
      .def_readwrite("dat_set", &GooseFrame::dat_set)
      .def_readwrite("go_id", &GooseFrame::go_id)
      .def_readwrite("ttl_ms", &GooseFrame::ttl_ms)
      .def_property("event_ts",
                    [](const GooseFrame& f) { return py::bytes(reinterpret_cast<const char*>(f.event_ts.data()), 8); },
                    [](GooseFrame& f, const py::bytes& b) {
                      const std::string s = b;
                      if (s.size() != 8) throw Error(ErrorKind::kConfig, "event_ts needs 8 bytes");
                      std::copy(s.begin(), s.end(), f.event_ts.begin());
                    })
      .def_readwrite("st_num", &GooseFrame::st_num)
      .def_readwrite("sq_num", &GooseFrame::sq_num)
      .def_readwrite("test", &GooseFrame::test)
      .def_readwrite("conf_rev", &GooseFrame::conf_rev)
      .def_readwrite("nds_com", &GooseFrame::nds_com)
      .def_readwrite("num_entries", &GooseFrame::num_entries)
      .def_property("all_data", [](const GooseFrame& f) { return to_bytes(f.all_data); },
                    [](GooseFrame& f, const py::bytes& b) { f.all_data = from_bytes(b); })
      .def_readonly("frame_len", &GooseFrame::frame_len)
      .def("__eq__", [](const GooseFrame& a, const GooseFrame& b) { return a == b; })
      .def("__repr__", [](const GooseFrame& f) {
        return "<GooseFrame " + f.goose_identity() + " st=" + std::to_string(f.st_num) +
               " sq=" + std::to_string(f.sq_num) + ">";
      });

  m.def("encode_frame", [](GooseFrame f) {
    refresh_lengths(f);
    return to_bytes(encode_frame(f));
  }, py::arg("frame"), "Ethernet frame bytes; Length fields are recomputed.");

  m.def("decode_frame", [](const py::bytes& data, TimestampUs ts_us) -> py::tuple {
    const auto bytes = from_bytes(data);
    DecodeResult r = decode_frame(bytes, ts_us);
    switch (r.status) {
      case DecodeStatus::kOk: return py::make_tuple("ok", std::move(r.frame), "");
      case DecodeStatus::kNotGoose: return py::make_tuple("not_goose", py::none(), "");
      case DecodeStatus::kMalformed: break;
    }
    return py::make_tuple("malformed", py::none(), r.reason);
  }, py::arg("data"), py::arg("ts_us") = 0, "(status, frame or None, reason)");

  m.def("read_pcap", [](const std::string& path) { return read_goose(path).frames; }, py::arg("path"));
  m.def("write_pcap", [](const std::vector<GooseFrame>& frames, const std::string& path) {
    write_pcap(frames, path);
  }, py::arg("frames"), py::arg("path"));

  m.def("synth", [](const std::string& scenario, const std::string& out_dir) {
    const auto r = cmd::synth(scenario, out_dir);
    py::dict d;
    d["pcap"] = r.pcap_path;
    d["labels"] = r.labels_path;
    d["frames"] = r.frames;
    d["intervals"] = r.intervals;
    return d;
  }, py::arg("scenario"), py::arg("out_dir"));

  m.def("extract", [](const std::string& pcap, const std::string& out, std::optional<std::string> labels, double tw,
                      std::optional<double> stride, const std::string& scope) {
    if (scope != "train" && scope != "infer") throw Error(ErrorKind::kConfig, "scope must be train or infer");
    const WindowConfig w{tw, stride.value_or(tw)};
    return cmd::extract(pcap, labels, w, scope == "train" ? Scope::kTrain : Scope::kInfer, out).size();
  }, py::arg("pcap"), py::arg("out"), py::arg("labels") = py::none(), py::arg("tw") = 1.0,
     py::arg("stride") = py::none(), py::arg("scope") = "train", "Writes features.csv; returns the row count.");

  m.def("train", [](const std::string& features, const std::string& profile, const std::string& view,
                    std::optional<std::uint64_t> seed, std::optional<std::size_t> epochs,
                    std::optional<double> learning_rate, std::optional<std::size_t> batch,
                    std::optional<double> val_frac, std::optional<std::size_t> patience,
                    std::optional<double> u_quantile, std::optional<double> q,
                    std::optional<std::vector<std::size_t>> seq_dims,
                    std::optional<std::vector<std::size_t>> temp_dims) {
    if (view != "seq" && view != "temp" && view != "both") throw Error(ErrorKind::kConfig, "view must be seq, temp or both");
    RunConfig c;
    c.seed = seed.value_or(default_seed());
    if (epochs) c.epochs = *epochs;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (batch) c.batch = *batch;
    if (val_frac) c.val_frac = *val_frac;
    if (patience) c.patience = *patience;
    if (u_quantile) c.u_quantile = *u_quantile;
    if (q) c.q = *q;
    if (seq_dims) c.seq_dims = *seq_dims;
    if (temp_dims) c.temp_dims = *temp_dims;
    std::vector<View> views;
    if (view != "temp") views.push_back(View::kSeq);
    if (view != "seq") views.push_back(View::kTemp);
    const DetectorProfile p = cmd::train(features, c, views, profile);
    py::dict d;
    for (View v : views) {
      const EvtThreshold& t = p.threshold(v);
      py::dict th;
      th["u"] = t.u;
      th["xi"] = t.xi;
      th["sigma"] = t.sigma;
      th["n"] = t.n;
      th["n_u"] = t.n_u;
      th["z_star"] = t.z_star;
      d[py::str(std::string(view_name(v)))] = th;
    }
    return d;
  }, py::arg("features"), py::arg("profile"), py::kw_only(), py::arg("view") = "both",
     py::arg("seed") = py::none(), py::arg("epochs") = py::none(), py::arg("learning_rate") = py::none(),
     py::arg("batch") = py::none(), py::arg("val_frac") = py::none(), py::arg("patience") = py::none(),
     py::arg("u_quantile") = py::none(), py::arg("q") = py::none(), py::arg("seq_dims") = py::none(),
     py::arg("temp_dims") = py::none(), "Writes profile.json; returns the calibrated thresholds per view.");

  m.def("detect", [](const std::string& profile, const std::string& features, const std::string& out_dir) {
    const auto v = cmd::detect(profile, features, out_dir);
    std::size_t flagged = 0;
    for (const auto& x : v) flagged += x.anomalous;
    py::dict d;
    d["windows"] = v.size();
    d["anomalous"] = flagged;
    return d;
  }, py::arg("profile"), py::arg("features"), py::arg("out_dir"));

  m.def("eval", [](const std::string& verdicts, const std::string& report) {
    const EvalReport r = cmd::eval(verdicts, report);
    py::list rows;
    for (const auto& row : r.rows) rows.append(row_dict(row));
    py::dict d;
    d["rows"] = rows;
    d["total_windows"] = r.total_windows;
    d["normal_windows"] = r.normal_windows;
    d["fused_false_positives"] = r.fused_false_positives;
    d["fp_share_total"] = r.fp_share_total;
    d["fp_rate_normal"] = r.fp_rate_normal;
    return d;
  }, py::arg("verdicts"), py::arg("report"));

  m.def("latent", &cmd::latent, py::arg("profile"), py::arg("features"), py::arg("out"));

  m.def("feature_names", [] {
    std::vector<std::string> names;
    for (const auto& c : kFeatureColumns) names.emplace_back(c.name);
    return names;
  });

  m.def("read_features", [](const std::string& path) {
    const FeatureMatrix x = io::read_features(path);
    py::array_t<double> values({x.size(), kNumFeatures});
    auto v = values.mutable_unchecked<2>();
    std::vector<std::string> flows, labels;
    std::vector<TimestampUs> starts;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < kNumFeatures; ++j) v(i, j) = x.rows[i][j];
      flows.push_back(x.meta[i].flow.to_string());
      labels.emplace_back(label_name(x.meta[i].label));
      starts.push_back(x.meta[i].t_start);
    }
    py::dict d;
    d["flow"] = flows;
    d["t_start_us"] = starts;
    d["label"] = labels;
    d["values"] = values;
    return d;
  }, py::arg("path"));

  m.def("metrics", [](std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    return row_dict(metrics_from_counts(tp, fp, tn, fn));
  }, py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"));

  m.def("fit_gpd", [](const std::vector<double>& excesses) {
    const GpdFit f = fit_gpd(excesses);
    const char* method = f.method == GpdMethod::kMaximumLikelihood ? "mle"
                         : f.method == GpdMethod::kMoments        ? "moments"
                                                                  : "degenerate";
    return py::make_tuple(f.xi, f.sigma, method);
  }, py::arg("excesses"), "(xi, sigma, method)");

  m.def("pot_threshold", &pot_threshold, py::arg("u"), py::arg("xi"), py::arg("sigma"), py::arg("q"), py::arg("n"),
        py::arg("n_u"));
}
