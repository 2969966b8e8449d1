#ifndef MONTY_LAB_H
#define MONTY_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MontyStatus {
  MONTY_STATUS_OK = 0,
  MONTY_STATUS_NULL_POINTER = 1,
  MONTY_STATUS_INVALID_PROBABILITY = 2,
  MONTY_STATUS_INVALID_PARAMETER = 3,
  MONTY_STATUS_ILLEGAL_DOOR = 4,
  MONTY_STATUS_PHASE_VIOLATION = 5,
  MONTY_STATUS_NO_CHOICE_AVAILABLE = 6,
  MONTY_STATUS_CONDITIONING_ON_NULL = 7,
  MONTY_STATUS_EMPTY_ARCHIVE = 8,
  // Result does not fit a 64-bit fraction.
  MONTY_STATUS_OVERFLOW = 9,
  MONTY_STATUS_PANIC = 10,
} MontyStatus;

typedef enum MontyRecommendation {
  MONTY_RECOMMENDATION_STAY = 0,
  MONTY_RECOMMENDATION_SWITCH = 1,
  MONTY_RECOMMENDATION_INDIFFERENT = 2,
} MontyRecommendation;

typedef enum MontyHostKind {
  MONTY_HOST_KIND_FAIR = 0,
  MONTY_HOST_KIND_EVIL = 1,
  // `param` is the evil frequency `p`.
  MONTY_HOST_KIND_MOODY = 2,
  // `param` is the reading accuracy.
  MONTY_HOST_KIND_MIND_READER = 3,
  // Sessions only.
  MONTY_HOST_KIND_ADAPTIVE = 4,
} MontyHostKind;

typedef enum MontyGuestKind {
  MONTY_GUEST_KIND_STAY = 0,
  MONTY_GUEST_KIND_SWITCH = 1,
  // `param` is the stay probability `q`.
  MONTY_GUEST_KIND_MIXED = 2,
  // `param` is the detection risk.
  MONTY_GUEST_KIND_ACTOR = 3,
} MontyGuestKind;

typedef enum MontyDecision {
  MONTY_DECISION_STAY = 0,
  MONTY_DECISION_SWITCH = 1,
  // Only as an input: no intent signaled.
  MONTY_DECISION_NONE = -1,
} MontyDecision;

typedef enum MontyPhase {
  MONTY_PHASE_AWAITING_PICK = 0,
  MONTY_PHASE_AWAITING_DECISION = 1,
  MONTY_PHASE_FINISHED = 2,
} MontyPhase;

// Opaque belief tracker.
typedef struct MontyBelief MontyBelief;

// Opaque interactive session.
typedef struct MontySession MontySession;

// Exact probability `num / den`.
typedef struct MontyFraction {
  uint64_t num;
  uint64_t den;
} MontyFraction;

typedef struct MontyHost {
  enum MontyHostKind kind;
  struct MontyFraction param;
} MontyHost;

typedef struct MontyGuest {
  enum MontyGuestKind kind;
  struct MontyFraction param;
} MontyGuest;

// One finished game. Doors are numbered 1 to 3.
typedef struct MontyTranscript {
  uint64_t seed;
  uint8_t car_door;
  uint8_t initial_pick;
  bool evil;
  enum MontyDecision signaled_intent;
  uint8_t opened_door;
  bool opened_mine;
  // `None` when the host opened the guest's door.
  enum MontyDecision final_decision;
  bool won;
} MontyTranscript;

typedef struct MontyReport {
  uint64_t replications;
  uint64_t wins;
  double win_rate;
  double std_error;
  // `{0, 0}` when the exact value does not fit.
  struct MontyFraction exact;
  double exact_f64;
  double z_score;
  uint64_t opened_mine;
} MontyReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code. Never null.
const char *monty_status_message(enum MontyStatus status);

// Message of the last failure on this thread, or null. Valid until the
// next failing call on the same thread.
const char *monty_last_error(void);

// Win probability against a moody host with evil frequency `p` for a guest
// who stays with probability `q`.
enum MontyStatus monty_win_probability(struct MontyFraction p,
                                       struct MontyFraction q,
                                       struct MontyFraction *out);

enum MontyStatus monty_posterior_evil_given_other(struct MontyFraction p,
                                                  struct MontyFraction *out);

enum MontyStatus monty_posterior_car_given_other(struct MontyFraction p, struct MontyFraction *out);

// Probability that the host opens the guest's own door.
enum MontyStatus monty_prob_opened_mine(struct MontyFraction p, struct MontyFraction *out);

enum MontyStatus monty_best_response(struct MontyFraction p, enum MontyRecommendation *out);

enum MontyStatus monty_indifference_point(struct MontyFraction *out);

// Plays one seeded game.
enum MontyStatus monty_play_game(const struct MontyHost *host,
                                 const struct MontyGuest *guest,
                                 uint64_t seed,
                                 struct MontyTranscript *out);

// Runs `replications` seeded games and compares the win rate with the
// exact value.
enum MontyStatus monty_run_batch(const struct MontyHost *host,
                                 const struct MontyGuest *guest,
                                 uint64_t replications,
                                 uint64_t seed,
                                 struct MontyReport *out);

enum MontyStatus monty_belief_new(struct MontyFraction prior_evil, struct MontyBelief **out);

// Records a host action. `opened_door` is ignored when `opened_mine`.
enum MontyStatus monty_belief_observe(struct MontyBelief *belief,
                                      bool opened_mine,
                                      uint8_t opened_door);

enum MontyStatus monty_belief_posterior_evil(const struct MontyBelief *belief,
                                             struct MontyFraction *out);

// Posterior that the car is behind the guest's own door.
enum MontyStatus monty_belief_posterior_car(const struct MontyBelief *belief,
                                            struct MontyFraction *out);

enum MontyStatus monty_belief_recommend(const struct MontyBelief *belief,
                                        enum MontyRecommendation *out);

// Null is accepted.
void monty_belief_free(struct MontyBelief *belief);

enum MontyStatus monty_session_new(const struct MontyHost *host,
                                   struct MontyFraction prior_evil,
                                   uint64_t seed,
                                   struct MontySession **out);

enum MontyStatus monty_session_phase(const struct MontySession *session, enum MontyPhase *out);

// Picks a door (1 to 3) with an optional signaled intent. A pick after a
// finished game deals the next one. `out_transcript` may be null; when the
// host opened the guest's door the game is over and it receives the
// transcript.
enum MontyStatus monty_session_pick(struct MontySession *session,
                                    int64_t door,
                                    enum MontyDecision intent,
                                    bool *out_finished,
                                    struct MontyTranscript *out_transcript);

enum MontyStatus monty_session_decide(struct MontySession *session,
                                      enum MontyDecision decision,
                                      struct MontyTranscript *out);

// The session's public view as JSON, released with [`monty_string_free`].
enum MontyStatus monty_session_view_json(const struct MontySession *session, char **out);

// Null is accepted.
void monty_session_free(struct MontySession *session);

// Null is accepted.
void monty_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MONTY_LAB_H */
