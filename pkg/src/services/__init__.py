# Service layer package for orchestration and file workflows.
