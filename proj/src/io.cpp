#include "envlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace envlab {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& origin, const std::string& field,
                              const std::string& expected) {
    throw ValidationError(origin + ": field \"" + field + "\" " + expected);
}

} // namespace

PureState parse_state_json(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ValidationError(origin + ": invalid JSON: " + err.what());
    }
    if (!doc.is_object()) throw ValidationError(origin + ": state file must be a JSON object");

    if (!doc.contains("labels") || !doc["labels"].is_array())
        field_error(origin, "labels", "must be an array of subsystem names");
    std::vector<std::string> labels;
    for (const auto& item : doc["labels"]) {
        if (!item.is_string()) field_error(origin, "labels", "must contain only strings");
        labels.push_back(item.get<std::string>());
    }

    if (!doc.contains("dims") || !doc["dims"].is_array())
        field_error(origin, "dims", "must be an array of positive integers");
    std::vector<Index> dims;
    for (const auto& item : doc["dims"]) {
        if (!item.is_number_integer() || item.get<std::int64_t>() <= 0)
            field_error(origin, "dims", "must contain only positive integers");
        dims.push_back(item.get<Index>());
    }

    if (!doc.contains("amplitudes") || !doc["amplitudes"].is_array())
        field_error(origin, "amplitudes", "must be an array of [re, im] pairs");
    Vector amps(static_cast<Index>(doc["amplitudes"].size()));
    Index k = 0;
    for (const auto& item : doc["amplitudes"]) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
            field_error(origin, "amplitudes", "must contain only [re, im] number pairs");
        amps[k++] = Complex{item[0].get<double>(), item[1].get<double>()};
    }

    try {
        return PureState(std::move(labels), std::move(dims), std::move(amps));
    } catch (const ValidationError& err) {
        throw ValidationError(origin + ": " + err.what());
    }
}

PureState load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open state file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_state_json(buffer.str(), path);
}

std::string state_to_json(const PureState& state) {
    nlohmann::ordered_json doc;
    doc["labels"] = state.labels();
    doc["dims"] = state.dims();
    auto& amps = doc["amplitudes"] = nlohmann::ordered_json::array();
    for (Index k = 0; k < state.dim(); ++k)
        amps.push_back({state.amplitudes()[k].real(), state.amplitudes()[k].imag()});
    return doc.dump();
}

void save_state(const PureState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write state file '" + path + "'");
    out << state_to_json(state) << "\n";
}

Complex parse_complex_token(const std::string& token) {
    std::string t;
    for (const char c : token)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw ValidationError("empty amplitude token");

    bool imaginary_tail = false;
    if (t.back() == 'j' || t.back() == 'i') {
        imaginary_tail = true;
        t.pop_back();
        if (t.empty() || t == "+" || t == "-") t += "1";
    }

    // Split at the sign that separates real and imaginary parts, if any.
    std::size_t split = std::string::npos;
    for (std::size_t k = 1; k < t.size(); ++k) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') split = k;
    }

    const auto parse_part = [&](const std::string& part) {
        double value = 0.0;
        const char* begin = part.data();
        const char* end = part.data() + part.size();
        if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading '+'
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end)
            throw ValidationError("malformed amplitude token '" + token + "'");
        return value;
    };

    if (split == std::string::npos)
        return imaginary_tail ? Complex{0.0, parse_part(t)} : Complex{parse_part(t), 0.0};
    if (!imaginary_tail)
        throw ValidationError("malformed amplitude token '" + token +
                              "' (expected re+imj form)");
    std::string imag_part = t.substr(split);
    if (imag_part == "+") imag_part = "1";
    if (imag_part == "-") imag_part = "-1";
    return Complex{parse_part(t.substr(0, split)), parse_part(imag_part)};
}

PureState parse_inline_state(const std::string& amplitudes, const std::vector<Index>& dims,
                             std::vector<std::string> labels) {
    if (dims.empty()) throw ValidationError("inline state needs --dims");
    if (labels.empty())
        for (std::size_t k = 0; k < dims.size(); ++k) labels.push_back("q" + std::to_string(k));

    std::vector<Complex> values;
    std::string token;
    std::istringstream stream(amplitudes);
    while (std::getline(stream, token, ',')) values.push_back(parse_complex_token(token));
    Vector amps(static_cast<Index>(values.size()));
    for (Index k = 0; k < amps.size(); ++k) amps[k] = values[static_cast<std::size_t>(k)];
    return PureState(std::move(labels), dims, std::move(amps));
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

} // namespace envlab
