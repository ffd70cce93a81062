// Copyright 2026 The SeaaS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python extension module `seaas._seaas`. Structured values cross the
// boundary as JSON text; the `seaas` package wraps them in dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "seaas/agent.hpp"
#include "seaas/errors.hpp"
#include "seaas/harness.hpp"
#include "seaas/protocol.hpp"
#include "seaas/service.hpp"
#include "seaas/suite.hpp"

namespace py = pybind11;

namespace {

using seaas::json::Json;

py::object optional_float(const std::optional<double>& v) { return v ? py::object(py::float_(*v)) : py::none(); }

std::string evaluate_json(const std::string& policy_document, const std::string& event_json) {
  const auto policy = seaas::parse_policy_document(policy_document);
  const auto event = seaas::json::event_from_json(Json::parse(event_json));
  return seaas::json::to_json(seaas::evaluate(policy, event)).dump();
}

py::bytes encode_frame(const std::string& body_json) {
  const auto msg = seaas::protocol::decode_body(body_json);
  const auto frame = seaas::protocol::encode_frame(msg);
  return py::bytes(reinterpret_cast<const char*>(frame.data()), frame.size());
}

// Returns (body_json or None, consumed).
py::tuple decode_frame(const py::bytes& data) {
  const std::string bytes = data;
  const auto result = seaas::protocol::decode_frame(
      std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
  if (!result.ok()) return py::make_tuple(py::none(), 0);
  return py::make_tuple(seaas::protocol::encode_body(*result.message), result.consumed);
}

std::vector<std::string> run_suite(const std::string& suite_dir, const std::string& policy_document,
                                   std::uint32_t trials, std::uint64_t seed) {
  const auto policy = seaas::parse_policy_document(policy_document);
  const auto suite = seaas::load_suite(suite_dir);
  std::vector<std::string> out;
  for (std::size_t t = 0; t < std::min<std::size_t>(trials, suite.size()); ++t) {
    seaas::TrialConfig config;
    config.trial_id = suite[t].first;
    config.users = suite[t].second;
    config.policy = policy;
    config.seed = seed;
    out.push_back(seaas::to_json(seaas::run_trial(config)).dump());
  }
  return out;
}

class PyService {
 public:
  explicit PyService(const std::optional<std::string>& policy_document) {
    std::optional<seaas::PolicySet> policy;
    if (policy_document) policy = seaas::parse_policy_document(*policy_document);
    service_ = std::make_unique<seaas::CloudService>(seaas::ServiceConfig{}, policy);
  }

  std::vector<std::string> handle(const std::string& body_json) {
    const auto msg = seaas::protocol::decode_body(body_json);
    std::vector<std::string> out;
    auto push = [this](const seaas::protocol::Message& m) { pushed_.push_back(seaas::protocol::encode_body(m)); };
    for (const auto& reply : service_->handle_message(msg, push)) out.push_back(seaas::protocol::encode_body(reply));
    return out;
  }

  std::vector<std::string> take_pushed() { return std::exchange(pushed_, {}); }

  std::uint64_t put_policy(const std::string& document) { return service_->put_policy(document); }

  std::uint64_t set_permission(const std::string& device, const std::string& app, const std::string& resource,
                               const std::string& verdict) {
    seaas::RuleDecision decision;
    if (verdict == "GRANT") {
      decision = seaas::RuleDecision::kGrant;
    } else if (verdict == "DENY") {
      decision = seaas::RuleDecision::kDeny;
    } else {
      throw py::value_error("verdict must be GRANT or DENY");
    }
    return service_->set_permission(device, app, resource, decision);
  }

  std::string active_policy() const { return seaas::serialize_policy_document(*service_->active_policy()); }

  std::vector<std::string> threats() const {
    std::vector<std::string> out;
    for (const auto& t : service_->threats()) out.push_back(seaas::json::to_json(t).dump());
    return out;
  }

 private:
  std::unique_ptr<seaas::CloudService> service_;
  std::vector<std::string> pushed_;
};

}  // namespace

PYBIND11_MODULE(_seaas, m) {
  m.doc() = "SeaaS engine bindings";

  auto error = py::register_exception<seaas::Error>(m, "Error");
  auto policy_error = py::register_exception<seaas::PolicyError>(m, "PolicyError", error.ptr());
  py::register_exception<seaas::ParseError>(m, "ParseError", policy_error.ptr());
  py::register_exception<seaas::DuplicateRule>(m, "DuplicateRule", policy_error.ptr());
  py::register_exception<seaas::InvalidRule>(m, "InvalidRule", policy_error.ptr());
  auto protocol_error = py::register_exception<seaas::ProtocolError>(m, "ProtocolError", error.ptr());
  py::register_exception<seaas::FramingError>(m, "FramingError", protocol_error.ptr());
  py::register_exception<seaas::MalformedMessage>(m, "MalformedMessage", protocol_error.ptr());
  py::register_exception<seaas::FrameTooLarge>(m, "FrameTooLarge", protocol_error.ptr());
  py::register_exception<seaas::UnknownResource>(m, "UnknownResource", error.ptr());
  py::register_exception<seaas::MetricError>(m, "MetricError", error.ptr());
  py::register_exception<seaas::LedgerError>(m, "LedgerError", error.ptr());
  py::register_exception<seaas::ExportError>(m, "ExportError", error.ptr());
  py::register_exception<seaas::TrialInvalid>(m, "TrialInvalid", error.ptr());

  m.def(
      "compute_detection_metrics",
      [](std::int64_t detected, std::int64_t undetected) {
        const auto metrics = seaas::compute_detection_metrics(detected, undetected);
        return py::make_tuple(optional_float(metrics.ratio), optional_float(metrics.rate));
      },
      py::arg("detected"), py::arg("undetected"));
  m.def(
      "classify_criticality",
      [](const std::string& name) { return std::string(seaas::to_string(seaas::classify_criticality(name))); },
      py::arg("resource"));
  m.def(
      "work_cost",
      [](const std::string& step, std::size_t rules) {
        return seaas::work_cost(seaas::parse_work_category(step), rules);
      },
      py::arg("step"), py::arg("rules_count") = 0);
  m.def(
      "canonical_policy",
      [](const std::string& doc) { return seaas::serialize_policy_document(seaas::parse_policy_document(doc)); },
      py::arg("document"));
  m.def("default_policy_pack", [] { return seaas::serialize_policy_document(seaas::default_policy_pack()); });
  m.def("evaluate_json", &evaluate_json, py::arg("policy_document"), py::arg("event_json"));
  m.def("encode_frame", &encode_frame, py::arg("body_json"));
  m.def("decode_frame", &decode_frame, py::arg("data"));
  m.def("run_suite", &run_suite, py::arg("suite_dir"), py::arg("policy_document"), py::arg("trials") = 5,
        py::arg("seed") = 42, py::call_guard<py::gil_scoped_release>());

  py::class_<PyService>(m, "Service")
      .def(py::init<const std::optional<std::string>&>(), py::arg("policy_document") = py::none())
      .def("handle", &PyService::handle, py::arg("body_json"))
      .def("take_pushed", &PyService::take_pushed)
      .def("put_policy", &PyService::put_policy, py::arg("document"))
      .def("set_permission", &PyService::set_permission, py::arg("device_id"), py::arg("app_id"),
           py::arg("resource"), py::arg("verdict"))
      .def("active_policy", &PyService::active_policy)
      .def("threats", &PyService::threats);
}
