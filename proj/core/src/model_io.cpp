#include "lsw/model_io.hpp"


#include "lsw/error.hpp"

namespace lsw {
namespace {

constexpr const char* kCurveFields[] = {"basis", "degree", "powers", "freqs", "link", "coeffs", "fixed"};

struct ParsedCurve {
    CurveSpec spec;
    std::vector<double> coeffs;
};

ParsedCurve parse_curve(const KeyValueConfig& cfg, const std::string& prefix)
{
    auto key = [&](const char* field) { return prefix + "." + field; };
    ParsedCurve out;
    const std::string basis = cfg.get_or(key("basis"), "polynomial");
    if (basis == "polynomial") {
        if (cfg.has(key("freqs")))
            throw ConfigError(key("freqs") + " given for a polynomial basis");
        if (cfg.has(key("powers")) && cfg.has(key("degree")))
            throw ConfigError(prefix + ": give either degree or powers, not both");
        if (cfg.has(key("powers")))
            out.spec.basis = BasisSpec::monomials(cfg.get_ints(key("powers")));
        else
            out.spec.basis = BasisSpec::polynomial(cfg.has(key("degree")) ? static_cast<int>(cfg.get_int(key("degree"))) : 0);
    } else if (basis == "harmonic") {
        if (cfg.has(key("degree")) || cfg.has(key("powers")))
            throw ConfigError(prefix + ": degree/powers given for a harmonic basis");
        out.spec.basis = BasisSpec::harmonic(cfg.has(key("freqs")) ? cfg.get_doubles(key("freqs")) : std::vector<double>{});
    } else {
        throw ConfigError(key("basis") + ": unknown basis '" + basis + "'");
    }

    const std::string link = cfg.get_or(key("link"), "identity");
    if (link == "identity")
        out.spec.link = LinkSpec::identity;
    else if (link == "log")
        out.spec.link = LinkSpec::log;
    else
        throw ConfigError(key("link") + ": unknown link '" + link + "'");

    out.coeffs = cfg.get_doubles(key("coeffs"));
    if (out.coeffs.size() != out.spec.basis.size())
        throw ConfigError(key("coeffs") + ": " + std::to_string(out.coeffs.size()) + " values for a basis of size "
                          + std::to_string(out.spec.basis.size()));
    const bool fixed = cfg.has(key("fixed")) && cfg.get_bool(key("fixed"));
    if (fixed)
        out.spec.fixed_coeffs = out.coeffs;
    return out;
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ',';
        s += format_double(v[i]);
    }
    return s;
}

} // namespace

ModelWithParams parse_model(const KeyValueConfig& cfg)
{
    ModelSpec model;
    std::vector<double> theta;
    auto take = [&](const std::string& prefix, CurveSpec& dest) {
        ParsedCurve c = parse_curve(cfg, prefix);
        dest = c.spec;
        if (!dest.is_fixed())
            theta.insert(theta.end(), c.coeffs.begin(), c.coeffs.end());
    };
    take("d", model.d);
    take("sigma", model.sigma);
    if (cfg.has("ar.coeffs")) {
        model.ar.emplace();
        take("ar", *model.ar);
    }
    if (cfg.has("ma.coeffs")) {
        model.ma.emplace();
        take("ma", *model.ma);
    }
    for (const char* prefix : {"ar", "ma"})
        for (const char* field : kCurveFields) {
            const std::string k = std::string(prefix) + "." + field;
            if (cfg.has(k) && !cfg.has(std::string(prefix) + ".coeffs"))
                throw ConfigError("missing required key '" + std::string(prefix) + ".coeffs' (" + k + " given)");
        }
    model.validate();
    try {
        return {model, ParamVector(model, std::move(theta))};
    } catch (const DimensionError& e) {
        throw ConfigError(e.what());
    }
}

void write_model(const ModelSpec& model, const ParamVector& theta, KeyValueConfig& cfg)
{
    auto put = [&](const std::string& prefix, Component c) {
        const CurveSpec* cs = model.curve(c);
        if (!cs)
            return;
        const BasisSpec& b = cs->basis;
        if (b.kind() == BasisSpec::Kind::polynomial) {
            cfg.set(prefix + ".basis", "polynomial");
            bool consecutive = true;
            for (std::size_t j = 0; j < b.powers().size(); ++j)
                consecutive = consecutive && b.powers()[j] == static_cast<int>(j);
            if (consecutive) {
                cfg.set(prefix + ".degree", std::to_string(b.powers().size() - 1));
            } else {
                std::vector<double> p(b.powers().begin(), b.powers().end());
                cfg.set(prefix + ".powers", join(p));
            }
        } else {
            cfg.set(prefix + ".basis", "harmonic");
            if (!b.frequencies().empty())
                cfg.set(prefix + ".freqs", join(b.frequencies()));
        }
        cfg.set(prefix + ".link", cs->link == LinkSpec::identity ? "identity" : "log");
        const auto coeffs = curve_coeffs(model, theta, c);
        cfg.set(prefix + ".coeffs", join(std::vector<double>(coeffs.begin(), coeffs.end())));
        if (cs->is_fixed())
            cfg.set(prefix + ".fixed", "true");
    };
    put("d", Component::d);
    put("sigma", Component::sigma);
    put("ar", Component::ar);
    put("ma", Component::ma);
}

std::set<std::string> model_keys()
{
    std::set<std::string> keys;
    for (const char* prefix : {"d", "sigma", "ar", "ma"})
        for (const char* field : kCurveFields)
            keys.insert(std::string(prefix) + "." + field);
    return keys;
}

} // namespace lsw
