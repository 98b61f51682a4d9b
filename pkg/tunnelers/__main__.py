from tunnelers.reporting.cli import main

raise SystemExit(main())
