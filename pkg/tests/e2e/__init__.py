# End-to-end tests
