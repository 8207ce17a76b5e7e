#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace candual {

// Minimal append-only JSON emitter.  Exists so every number in report files
// goes out as %.17g (lossless for IEEE doubles) regardless of locale, which
// keeps emitted reports bit-for-bit reproducible across runs.
class JsonWriter {
 public:
  std::string str() const { return out_; }

  JsonWriter& begin_object() {
    separate();
    out_ += '{';
    stack_.push_back(State::FirstInObject);
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    stack_.pop_back();
    mark_value_written();
    return *this;
  }
  JsonWriter& begin_array() {
    separate();
    out_ += '[';
    stack_.push_back(State::FirstInArray);
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    stack_.pop_back();
    mark_value_written();
    return *this;
  }

  JsonWriter& key(const std::string& name) {
    separate();
    write_quoted(name);
    out_ += ':';
    pending_key_ = true;
    return *this;
  }

  JsonWriter& value(double x) {
    separate();
    if (std::isfinite(x)) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out_ += buf;
    } else {
      // JSON has no literal for these; stringify so reports stay parseable.
      out_ += std::isnan(x) ? "\"nan\"" : (x > 0 ? "\"inf\"" : "\"-inf\"");
    }
    mark_value_written();
    return *this;
  }
  JsonWriter& value(std::int64_t x) {
    separate();
    out_ += std::to_string(x);
    mark_value_written();
    return *this;
  }
  JsonWriter& value(int x) { return value(static_cast<std::int64_t>(x)); }
  JsonWriter& value(std::size_t x) {
    return value(static_cast<std::int64_t>(x));
  }
  JsonWriter& value(bool x) {
    separate();
    out_ += x ? "true" : "false";
    mark_value_written();
    return *this;
  }
  JsonWriter& value(const std::string& s) {
    separate();
    write_quoted(s);
    mark_value_written();
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string(s)); }

  // Splices an already-serialized JSON value in verbatim; used to nest the
  // library report documents inside a command envelope.
  JsonWriter& raw_value(const std::string& json) {
    separate();
    out_ += json;
    mark_value_written();
    return *this;
  }

  template <class T>
  JsonWriter& field(const std::string& name, const T& v) {
    key(name);
    return value(v);
  }
  template <class T>
  JsonWriter& number_array(const std::string& name,
                           const std::vector<T>& xs) {
    key(name);
    begin_array();
    for (const T& x : xs) value(x);
    return end_array();
  }

 private:
  enum class State { FirstInObject, InObject, FirstInArray, InArray };

  void separate() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    if (stack_.empty()) return;
    State& s = stack_.back();
    if (s == State::InObject || s == State::InArray) out_ += ',';
  }
  void mark_value_written() {
    if (stack_.empty()) return;
    State& s = stack_.back();
    if (s == State::FirstInObject) s = State::InObject;
    if (s == State::FirstInArray) s = State::InArray;
  }
  void write_quoted(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<State> stack_;
  bool pending_key_ = false;
};

}  // namespace candual
