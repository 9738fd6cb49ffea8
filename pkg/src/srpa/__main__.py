from srpa.cli import main

raise SystemExit(main())
