"""Human-in-the-loop MT post-editing loop: domain model, online QE learner,
scheduler, provider clients, event-sourced store, HTTP service, and a
simulation harness."""

__version__ = "0.1.0"
