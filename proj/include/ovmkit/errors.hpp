#pragma once

#include <stdexcept>
#include <string>

namespace ovmkit {

// Root of the library's failure hierarchy. Domain failures (bad operands,
// unsatisfied hypotheses, diverging integrals) and io failures (file parse,
// schema violations) are kept apart so callers can map them to distinct
// exit codes.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

class domain_error : public error {
public:
  using error::error;
};

class io_error : public error {
public:
  using error::error;
};

class not_hermitian : public domain_error { public: using domain_error::domain_error; };
class not_psd : public domain_error { public: using domain_error::domain_error; };
class not_density : public domain_error { public: using domain_error::domain_error; };
class not_full_rank : public domain_error { public: using domain_error::domain_error; };
class not_positive : public domain_error { public: using domain_error::domain_error; };
class not_self_adjoint : public domain_error { public: using domain_error::domain_error; };
class not_qpm : public domain_error { public: using domain_error::domain_error; };
class not_summing_to_qpm : public domain_error { public: using domain_error::domain_error; };
class not_atomic : public domain_error { public: using domain_error::domain_error; };
class not_integrable : public domain_error { public: using domain_error::domain_error; };
class no_derivative : public domain_error { public: using domain_error::domain_error; };
class not_absolutely_continuous : public domain_error { public: using domain_error::domain_error; };
class space_mismatch : public domain_error { public: using domain_error::domain_error; };
class dim_mismatch : public domain_error { public: using domain_error::domain_error; };
class bad_grid : public domain_error { public: using domain_error::domain_error; };
class not_disjoint : public domain_error { public: using domain_error::domain_error; };
class hypothesis_violated : public domain_error { public: using domain_error::domain_error; };
class invalid_channel : public domain_error { public: using domain_error::domain_error; };
class not_found : public domain_error { public: using domain_error::domain_error; };

class parse_error : public io_error { public: using io_error::io_error; };
class schema_error : public io_error { public: using io_error::io_error; };

}  // namespace ovmkit
