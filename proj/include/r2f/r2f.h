/* C interface to the r2f document-level NLI engine.
 *
 * Every function returns an r2f_status. On failure the message for the
 * calling thread is available from r2f_last_error() until the next call.
 * Strings returned through char** out-parameters are heap-allocated and
 * must be released with r2f_string_free().
 */
#ifndef R2F_R2F_H
#define R2F_R2F_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(R2F_BUILDING)
#define R2F_API __declspec(dllexport)
#else
#define R2F_API __declspec(dllimport)
#endif
#else
#define R2F_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum r2f_status {
  R2F_OK = 0,
  R2F_ERR_INVALID_ARGUMENT = 1,
  R2F_ERR_IO = 2,
  R2F_ERR_PARSE = 3,
  R2F_ERR_VALIDATION = 4,
  R2F_ERR_VERSION_MISMATCH = 5,
  R2F_ERR_CORRUPT_CHECKPOINT = 6,
  R2F_ERR_MISSING_EMBEDDINGS = 7,
  R2F_ERR_EMPTY_DATASET = 8,
  R2F_ERR_NON_FINITE_LOSS = 9,
  R2F_ERR_TOLERANCE = 10,
  R2F_ERR_INTERNAL = 11
} r2f_status;

typedef struct r2f_config r2f_config;
typedef struct r2f_model r2f_model;

R2F_API const char* r2f_version(void);
R2F_API const char* r2f_last_error(void);
R2F_API const char* r2f_status_name(r2f_status status);
R2F_API void r2f_string_free(char* text);

/* Run configuration: flat key=value settings with section prefixes. */
R2F_API r2f_status r2f_config_new(r2f_config** out);
R2F_API void r2f_config_free(r2f_config* config);
R2F_API r2f_status r2f_config_load(r2f_config* config, const char* path);
R2F_API r2f_status r2f_config_set(r2f_config* config, const char* key, const char* value);
R2F_API r2f_status r2f_config_set_seed(r2f_config* config, unsigned long long seed);
R2F_API r2f_status r2f_config_get(const r2f_config* config, const char* key, char** value);
/* Fully resolved settings, one key=value per line. */
R2F_API r2f_status r2f_config_dump(const r2f_config* config, char** text);
/* Checks every typed section without running anything. */
R2F_API r2f_status r2f_config_validate(const r2f_config* config);

/* Label counts and word-length histogram of a dataset file. */
R2F_API r2f_status r2f_stats(const r2f_config* config, const char* dataset_path, char** report);

/* Writes train/dev/test pairs plus *.gold.jsonl annotations into out_dir. */
R2F_API r2f_status r2f_synth(const r2f_config* config, const char* out_dir);

/* Evidence file with one record per (pair, hypothesis sentence).
 * embeddings_path may be NULL unless retrieval.method is embedding_cosine. */
R2F_API r2f_status r2f_retrieve(const r2f_config* config, const char* dataset_path,
                                const char* embeddings_path, const char* out_path);

typedef void (*r2f_log_fn)(const char* line, void* user);

/* Trains on materialized evidence and writes the selected checkpoint.
 * Evidence paths may be NULL, in which case retrieval runs in memory.
 * Each dev evaluation is passed to `log` (may be NULL). */
R2F_API r2f_status r2f_train(const r2f_config* config, const char* train_path,
                             const char* train_evidence_path, const char* dev_path,
                             const char* dev_evidence_path, const char* checkpoint_path,
                             r2f_log_fn log, void* user);

R2F_API r2f_status r2f_model_load(const char* checkpoint_path, r2f_model** out);
R2F_API void r2f_model_free(r2f_model* model);
/* Document score for one pair, retrieving with the checkpoint's settings
 * (embedding retrieval is not available here). */
R2F_API r2f_status r2f_model_score(const r2f_model* model, const char* hypothesis,
                                   const char* premise, double* score, int* entailed);

/* Prediction file (JSON lines) for a dataset and its evidence file;
 * evidence_path may be NULL to retrieve with the checkpoint's settings. */
R2F_API r2f_status r2f_predict(const r2f_config* config, const char* checkpoint_path,
                               const char* dataset_path, const char* evidence_path,
                               const char* embeddings_path, const char* out_path);

/* Reports are key=value text; table (may be NULL) receives a header row
 * and a value row, tab separated. */
R2F_API r2f_status r2f_eval_doc(const r2f_config* config, const char* predictions_path,
                                const char* dataset_path, char** report, char** table);
R2F_API r2f_status r2f_eval_sent(const r2f_config* config, const char* predictions_path,
                                 const char* annotations_path, char** report, char** table);

/* Finite-difference check of the configured fusion head. Returns
 * R2F_ERR_TOLERANCE when the error exceeds gradcheck.tolerance. */
R2F_API r2f_status r2f_gradcheck(const r2f_config* config, double* max_relative_error,
                                 char** report);

/* Retrieve, train, predict and evaluate once per K in sweep.ks, writing
 * k<K>.txt reports into out_dir. test_annotations_path may be NULL. */
R2F_API r2f_status r2f_sweep_k(const r2f_config* config, const char* train_path,
                               const char* dev_path, const char* test_path,
                               const char* test_annotations_path, const char* embeddings_path,
                               const char* out_dir, char** summary);

/* Scoring primitives. */
R2F_API r2f_status r2f_rouge1(const char* a, const char* b, double* score);
R2F_API r2f_status r2f_count_sentences(const char* text, size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* R2F_R2F_H */
