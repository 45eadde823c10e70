#ifndef CAUSAL_TEAMS_H
#define CAUSAL_TEAMS_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define CT_RELATION_TRUTH 0

#define CT_RELATION_FALSIFIABLE 1

#define CT_RELATION_ADMISSIBLE 2

// Recursive on acyclic graphs, unique solutions otherwise.
#define CT_POLICY_DEFAULT 0

#define CT_POLICY_RECURSIVE 1

#define CT_POLICY_UNIQUE 2

#define CT_POLICY_AT_MOST_UNIQUE 3

#define CT_CAUSE_DIRECT 0

#define CT_CAUSE_PROBABILISTIC_DIRECT 1

#define CT_CAUSE_TOTAL 2

typedef enum CtStatus {
  CT_STATUS_OK = 0,
  CT_STATUS_NULL_POINTER = 1,
  CT_STATUS_INVALID_UTF8 = 2,
  // Formula or intervention syntax error.
  CT_STATUS_PARSE = 3,
  // Malformed document or invalid team.
  CT_STATUS_INVALID_TEAM = 4,
  // The question cannot be answered on this team (unknown variables,
  // formal entries, unsupported fragment, empty support, ...).
  CT_STATUS_EVALUATION = 5,
  CT_STATUS_INTERVENTION = 6,
  CT_STATUS_CAUSE = 7,
  // An argument such as a relation or policy code is out of range.
  CT_STATUS_INVALID_ARGUMENT = 8,
  CT_STATUS_PANIC = 9,
} CtStatus;

// Opaque causal team.
typedef struct CtTeam CtTeam;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library.
const char *ct_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void ct_string_free(char *s);

// Parses and validates a JSON team document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum CtStatus ct_team_from_json(const char *json, struct CtTeam **out);

// # Safety
// `team` must be null or a handle from this library, not yet freed.
void ct_team_free(struct CtTeam *team);

// # Safety
// `team` must be a live handle; `out` must be writable.
enum CtStatus ct_team_to_json(const struct CtTeam *team, char **out);

// The support as an aligned table.
//
// # Safety
// `team` must be a live handle; `out` must be writable.
enum CtStatus ct_team_render(const struct CtTeam *team, char **out);

// Number of rows in the support.
//
// # Safety
// `team` must be a live handle; `out` must be writable.
enum CtStatus ct_team_len(const struct CtTeam *team, size_t *out);

// Decides `formula` under one of the `CT_RELATION_*` relations.
// `policy` is a `CT_POLICY_*` code; partial teams are completed before `~>`.
//
// # Safety
// `team` must be a live handle, `formula` a NUL-terminated string and
// `verdict` writable.
enum CtStatus ct_check(const struct CtTeam *team,
                       const char *formula,
                       uint32_t relation,
                       uint32_t policy,
                       bool *verdict);

// `Pr(formula)` as a reduced fraction.
//
// # Safety
// `team` must be a live handle, `formula` a NUL-terminated string,
// `numerator` and `denominator` writable.
enum CtStatus ct_probability(const struct CtTeam *team,
                             const char *formula,
                             int64_t *numerator,
                             int64_t *denominator);

// Applies an intervention such as `X=1 & Y=2`. Partial recursive teams are
// completed first.
//
// # Safety
// `team` must be a live handle, `intervention` a NUL-terminated string and
// `out` writable. The new handle is owned by the caller.
enum CtStatus ct_intervene(const struct CtTeam *team,
                           const char *intervention,
                           uint32_t policy,
                           struct CtTeam **out);

// Completes partially defined functions with observed values and formal terms.
//
// # Safety
// `team` must be a live handle and `out` writable.
enum CtStatus ct_complete(const struct CtTeam *team, struct CtTeam **out);

// Decides whether `x` is a cause of `y` (`CT_CAUSE_*`). When it is and
// `witness` is not null, a description of the witness is stored there;
// otherwise `*witness` is set to null.
//
// # Safety
// `team` must be a live handle, `x` and `y` NUL-terminated strings, `holds`
// writable and `witness` null or writable.
enum CtStatus ct_cause(const struct CtTeam *team,
                       uint32_t kind,
                       const char *x,
                       const char *y,
                       bool *holds,
                       char **witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAUSAL_TEAMS_H */
